// SPDX-License-Identifier: Apache-2.0
//
// cbsbeam: convolutional beamspace processing for multi-user MIMO receivers
// Copyright (C) 2026 The cbsbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include "cbsbeam/counter.hpp"

namespace cbs
{
    namespace
    {
        thread_local MultiplyScope *active_scope = nullptr;
    }

    MultiplyScope::MultiplyScope(bool detached) : parent_(active_scope), detached_(detached) { active_scope = this; }

    MultiplyScope::~MultiplyScope()
    {
        active_scope = parent_;
        if (parent_ && !detached_)
            parent_->count_ += count_;
    }

    void count_multiplies(std::uint64_t n)
    {
        if (active_scope)
            active_scope->count_ += n;
    }
}
