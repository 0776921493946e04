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

#include "quasidiff/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace quasidiff {

  namespace {
    std::atomic<unsigned> g_threads{ 0 };
  }

  void set_thread_hint(unsigned n) noexcept { g_threads.store(n); }

  unsigned thread_hint() noexcept
  {
    const unsigned n = g_threads.load();
    if (n > 0)
      return n;
    return std::max(1u, std::thread::hardware_concurrency());
  }

  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
  {
    const std::size_t nthreads = std::min<std::size_t>(thread_hint(), n);
    if (nthreads <= 1) {
      for (std::size_t i = 0; i < n; ++i)
        fn(i);
      return;
    }
    std::atomic<std::size_t> next{ 0 };
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error)
            first_error = std::current_exception();
          next = n;
        }
      }
    };
    std::vector<std::jthread> pool;
    pool.reserve(nthreads - 1);
    for (std::size_t t = 1; t < nthreads; ++t)
      pool.emplace_back(worker);
    worker();
    pool.clear();
    if (first_error)
      std::rethrow_exception(first_error);
  }

}
