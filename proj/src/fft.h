/*
 * Copyright 2026 The bbev Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BBEV_SRC_FFT_H_
#define BBEV_SRC_FFT_H_

#include <complex>

#include <unsupported/Eigen/FFT>

namespace bbev::internal {

// Eigen::FFT caches plans and scratch buffers, so each thread owns one.
inline Eigen::FFT<double>& ThreadFft() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace bbev::internal

#endif  // BBEV_SRC_FFT_H_
