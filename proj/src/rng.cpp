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

#include "quasidiff/rng.hpp"

namespace quasidiff {

  namespace {
    constexpr std::uint32_t kMulA = 0xD2511F53u;
    constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi)
    {
      const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
      lo = static_cast<std::uint32_t>(p);
      hi = static_cast<std::uint32_t>(p >> 32);
    }
  }

  std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                          std::array<std::uint32_t, 2> k) noexcept
  {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k[0] += kWeylA;
        k[1] += kWeylB;
      }
      std::uint32_t lo0, hi0, lo1, hi1;
      mulhilo(kMulA, c[0], lo0, hi0);
      mulhilo(kMulB, c[2], lo1, hi1);
      c = { hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0 };
    }
    return c;
  }

  std::uint64_t CounterRng::bits(std::uint64_t index, std::uint64_t stream) const noexcept
  {
    const auto out = philox4x32(
      { static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32) },
      { static_cast<std::uint32_t>(m_seed), static_cast<std::uint32_t>(m_seed >> 32) });
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  }

}
