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

#ifndef CBSBEAM_COUNTER_HPP
#define CBSBEAM_COUNTER_HPP

#include <cstdint>

namespace cbs
{
    // Runtime multiplication counter. Instrumented kernels call count_multiplies();
    // counts go to the innermost live MultiplyScope on the calling thread.
    class MultiplyScope
    {
    public:
        // detached scopes keep their count to themselves instead of passing it to the parent.
        explicit MultiplyScope(bool detached = false);
        ~MultiplyScope();
        MultiplyScope(const MultiplyScope &) = delete;
        MultiplyScope &operator=(const MultiplyScope &) = delete;

        std::uint64_t count() const { return count_; }

    private:
        std::uint64_t count_ = 0;
        MultiplyScope *parent_ = nullptr;
        bool detached_ = false;
        friend void count_multiplies(std::uint64_t);
    };

    void count_multiplies(std::uint64_t n);
}

#endif
