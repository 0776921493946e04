////////////////////////////////////////////////////////////////////////////////
//                                                                            //
//  This file is part of quasidiff                                            //
//                                                                            //
//  Copyright 2026 quasidiff developers                                       //
//                                                                            //
//  Licensed under the Apache License, Version 2.0 (the "License");           //
//  you may not use this file except in compliance with the License.          //
//  You may obtain a copy of the License at                                   //
//                                                                            //
//      http://www.apache.org/licenses/LICENSE-2.0                            //
//                                                                            //
//  Unless required by applicable law or agreed to in writing, software       //
//  distributed under the License is distributed on an "AS IS" BASIS,         //
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.  //
//  See the License for the specific language governing permissions and       //
//  limitations under the License.                                            //
//                                                                            //
////////////////////////////////////////////////////////////////////////////////

#ifndef QUASIDIFF_PARALLEL_HPP
#define QUASIDIFF_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace quasidiff {

  // Thread-count hint shared by all parallel loops. 0 means hardware
  // concurrency. Results never depend on this value: parallel loops only
  // write to per-index slots, and reductions are merged in index order.
  void set_thread_hint(unsigned n) noexcept;
  unsigned thread_hint() noexcept;

  // Calls fn(i) for i in [0, n), spread over up to thread_hint() threads.
  // The first exception thrown by any task is rethrown on the caller.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}

#endif
