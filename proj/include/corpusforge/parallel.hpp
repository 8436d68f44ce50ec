// Copyright 2026 The corpusforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CORPUSFORGE_PARALLEL_HPP_
#define CORPUSFORGE_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <deque>
#include <exception>
#include <future>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

namespace corpusforge {

// Maps fn over items on up to `jobs` threads. Results come back in input
// order regardless of the thread count. The first exception (by item index)
// is rethrown after all workers join.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, std::size_t jobs, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, const T&>> {
  using R = std::invoke_result_t<Fn&, const T&>;
  std::vector<R> out(items.size());
  jobs = std::max<std::size_t>(1, std::min(jobs, items.size()));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  const std::size_t per = (items.size() + jobs - 1) / jobs;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      const std::size_t begin = w * per;
      const std::size_t end = std::min(items.size(), begin + per);
      try {
        for (std::size_t i = begin; i < end; ++i) out[i] = fn(items[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Runs fn(0) .. fn(count - 1) with at most `in_flight` calls outstanding and
// returns the results in index order. After the first failure no new calls
// start; the earliest failing index's exception is rethrown once the calls
// already running finish.
template <typename Fn>
auto run_batches(std::size_t count, std::size_t in_flight, Fn fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<R> out(count);
  in_flight = std::max<std::size_t>(1, in_flight);
  std::deque<std::pair<std::size_t, std::future<R>>> pending;
  std::exception_ptr error;
  std::size_t error_index = count;
  const auto drain_one = [&] {
    auto [i, fut] = std::move(pending.front());
    pending.pop_front();
    try {
      out[i] = fut.get();
    } catch (...) {
      if (i < error_index) {
        error = std::current_exception();
        error_index = i;
      }
    }
  };
  for (std::size_t i = 0; i < count && !error; ++i) {
    while (pending.size() >= in_flight) drain_one();
    if (error) break;
    pending.emplace_back(i, std::async(std::launch::async, [&fn, i] { return fn(i); }));
  }
  while (!pending.empty()) drain_one();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_PARALLEL_HPP_
