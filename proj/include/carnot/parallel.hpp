#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace carnot {

// splitmix64 finalizer; gives each sample index its own stream so results do
// not depend on how work is split between threads.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index)
{
	std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index)
{
	return std::mt19937_64(mix_seed(seed, index));
}

// Runs f(i) for i in [0, n). threads <= 1 runs inline.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f)
{
	if (threads <= 1 || n < 2)
	{
		for (std::size_t i = 0; i < n; ++i) f(i);
		return;
	}
	std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
	std::vector<std::thread> pool;
	std::exception_ptr err;
	std::mutex mu;
	for (std::size_t w = 0; w < t; ++w)
		pool.emplace_back([&, w] {
			try
			{
				for (std::size_t i = w; i < n; i += t) f(i);
			}
			catch (...)
			{
				std::lock_guard<std::mutex> lock(mu);
				if (!err) err = std::current_exception();
			}
		});
	for (auto& th : pool) th.join();
	if (err) std::rethrow_exception(err);
}

} // namespace carnot
