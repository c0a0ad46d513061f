/*
 * Copyright 2026 The infolab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef INFOLAB_RNG_HPP_
#define INFOLAB_RNG_HPP_

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace infolab {

using Engine = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

inline Engine make_engine(std::uint64_t seed) { return Engine(mix_seed(seed, 0x5eed)); }

/// rows x cols matrix of i.i.d. standard normal draws, filled row-major.
Eigen::MatrixXd standard_normal(Engine& rng, Eigen::Index rows, Eigen::Index cols);

/// Number of worker threads; honors SSL_INFOLAB_THREADS, defaults to hardware concurrency.
unsigned worker_threads();

} // namespace infolab

#endif // INFOLAB_RNG_HPP_
