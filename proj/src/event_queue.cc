// Copyright 2026 The hysched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hysched/event_queue.h"

#include "absl/strings/str_cat.h"

namespace hysched {

const char* EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kArrival:
      return "arrival";
    case EventKind::kSliceExpiry:
      return "slice_expiry";
    case EventKind::kLimitExpiry:
      return "limit_expiry";
    case EventKind::kCompletion:
      return "completion";
    case EventKind::kMonitorTick:
      return "monitor_tick";
  }
  return "unknown";
}

absl::Status EventQueue::Push(Event ev) {
  if (ev.at < now_) {
    return absl::InternalError(
        absl::StrCat(EventKindName(ev.kind), " event at ", ev.at.micros(),
                     "us is in the past (clock ", now_.micros(), "us)"));
  }
  ev.seq = next_seq_++;
  heap_.push(ev);
  return absl::OkStatus();
}

Event EventQueue::Pop() {
  Event ev = heap_.top();
  heap_.pop();
  now_ = ev.at;
  return ev;
}

}  // namespace hysched
