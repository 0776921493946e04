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

#ifndef QUASIDIFF_RNG_HPP
#define QUASIDIFF_RNG_HPP

#include <array>
#include <cstdint>

namespace quasidiff {

  // Philox4x32-10 (Salmon et al., SC'11). Stateless: every draw is a pure
  // function of (key, counter), so per-point randomness does not depend on
  // iteration order or thread schedule.
  std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) noexcept;

  class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) noexcept : m_seed(seed) {}

    std::uint64_t bits(std::uint64_t index, std::uint64_t stream = 0) const noexcept;

    // Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t index, std::uint64_t stream = 0) const noexcept
    {
      return static_cast<double>(bits(index, stream) >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed() const noexcept { return m_seed; }

  private:
    std::uint64_t m_seed;
  };

}

#endif
