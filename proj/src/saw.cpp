#include "plaq/saw.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace plaq {

namespace {

// Visited flags on a dense box of side 2k+1 centred on the origin, addressed
// by a flat index so that a step is a single add.
class WalkGrid {
 public:
  WalkGrid(int d, int k) {
    const std::int64_t side = 2 * k + 1;
    std::int64_t stride = 1;
    for (int i = 0; i < d; ++i) {
      offsets_.push_back(-stride);
      offsets_.push_back(stride);
      stride *= side;
    }
    visited_.assign(static_cast<std::size_t>(stride), 0);
    center_ = (stride - 1) / 2;
  }

  std::int64_t center() const { return center_; }
  const std::vector<std::int64_t>& offsets() const { return offsets_; }
  std::vector<std::uint8_t>& visited() { return visited_; }

 private:
  std::int64_t center_ = 0;
  std::vector<std::int64_t> offsets_;
  std::vector<std::uint8_t> visited_;
};

std::uint64_t count_below(std::vector<std::uint8_t>& visited, const std::vector<std::int64_t>& offsets,
                          std::int64_t at, int remaining) {
  if (remaining == 1) {
    std::uint64_t n = 0;
    for (auto off : offsets) n += visited[static_cast<std::size_t>(at + off)] == 0;
    return n;
  }
  std::uint64_t n = 0;
  for (auto off : offsets) {
    const auto next = static_cast<std::size_t>(at + off);
    if (visited[next]) continue;
    visited[next] = 1;
    n += count_below(visited, offsets, at + off, remaining - 1);
    visited[next] = 0;
  }
  return n;
}

std::uint64_t count_subtree(int d, int k, int first_step) {
  WalkGrid grid(d, k);
  auto& visited = grid.visited();
  const auto c = grid.center();
  const auto first = c + grid.offsets()[static_cast<std::size_t>(first_step)];
  visited[static_cast<std::size_t>(c)] = 1;
  visited[static_cast<std::size_t>(first)] = 1;
  if (k == 1) return 1;
  return count_below(visited, grid.offsets(), first, k - 1);
}

}  // namespace

int saw_length_cap(int d) {
  check_dim(d);
  if (d == 2) return 16;
  if (d == 3) return 12;
  return 8;
}

SawCount count_saw(int d, int k, const SawOptions& opts) {
  check_dim(d);
  if (k < 0) throw std::invalid_argument("walk length must be nonnegative");
  const int cap = opts.k_cap > 0 ? opts.k_cap : saw_length_cap(d);
  if (k > cap) {
    throw std::out_of_range("walk length " + std::to_string(k) + " exceeds the enumeration cap " +
                            std::to_string(cap) + " for d=" + std::to_string(d));
  }
  if (k == 0) return {d, 0, BigInt(1)};

  std::vector<int> steps;
  if (opts.fold_first_step) {
    steps.push_back(1);  // +e_1
  } else {
    for (int s = 0; s < 2 * d; ++s) steps.push_back(s);
  }

  std::vector<std::uint64_t> partial(steps.size(), 0);
  int threads = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(steps.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < steps.size(); ++i) partial[i] = count_subtree(d, k, steps[i]);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = static_cast<std::size_t>(t); i < steps.size(); i += static_cast<std::size_t>(threads)) {
          partial[i] = count_subtree(d, k, steps[i]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  BigInt total = 0;
  for (auto v : partial) total += v;
  if (opts.fold_first_step) total *= 2 * d;
  return {d, k, total};
}

BigInt saw_upper_bound(int d, int k) {
  check_dim(d);
  if (k < 1) throw std::invalid_argument("saw_upper_bound requires k >= 1");
  BigInt b = 2 * d;
  for (int i = 1; i < k; ++i) b *= (2 * d - 1);
  return b;
}

double mu_upper_estimate(int d, int k, const SawOptions& opts) {
  if (k < 1) throw std::invalid_argument("mu_upper_estimate requires k >= 1");
  return mu_from_count(count_saw(d, k, opts).count, k);
}

double mu_from_count(const BigInt& sigma, int k) {
  if (k < 1 || sigma < 1) throw std::invalid_argument("mu_from_count requires k >= 1 and a positive count");
  return std::exp(std::log(sigma.convert_to<double>()) / k);
}

void for_each_saw(int d, int k_max, const std::function<bool(std::span<const Site>)>& visit) {
  check_dim(d);
  std::vector<Site> walk{origin(d)};
  // Walks are short; a linear membership scan beats hashing here.
  auto on_walk = [&](const Site& s) {
    for (const auto& w : walk) {
      if (w == s) return true;
    }
    return false;
  };
  std::function<void()> descend = [&] {
    if (static_cast<int>(walk.size()) - 1 == k_max) return;
    for (int n = 0; n < 2 * d; ++n) {
      const Site next = neighbor(walk.back(), n);
      if (on_walk(next)) continue;
      walk.push_back(next);
      if (visit(walk)) descend();
      walk.pop_back();
    }
  };
  descend();
}

}  // namespace plaq
