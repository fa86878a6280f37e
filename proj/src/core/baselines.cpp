#include "expertbayes/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include "expertbayes/cpt_learning.hpp"
#include "expertbayes/error.hpp"

namespace expertbayes {

double k2_family_score(const Dataset& data, std::size_t node, std::span<const std::size_t> parents) {
  const std::size_t r = data.column(node).states.size();
  std::vector<std::size_t> cards;
  std::size_t q = 1;
  for (std::size_t p : parents) {
    cards.push_back(data.column(p).states.size());
    q *= cards.back();
  }
  std::vector<std::size_t> counts(q * r, 0);
  for (std::size_t row = 0; row < data.row_count(); ++row) {
    const int x = data.cell(row, node);
    if (x == kMissing) continue;
    std::size_t j = 0;
    bool complete = true;
    for (std::size_t i = 0; i < parents.size(); ++i) {
      const int ps = data.cell(row, parents[i]);
      if (ps == kMissing) {
        complete = false;
        break;
      }
      j = j * cards[i] + static_cast<std::size_t>(ps);
    }
    if (complete) ++counts[j * r + static_cast<std::size_t>(x)];
  }
  const double lg_r = std::lgamma(static_cast<double>(r));
  double score = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    std::size_t n_j = 0;
    double inner = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      n_j += counts[j * r + k];
      inner += std::lgamma(static_cast<double>(counts[j * r + k]) + 1.0);
    }
    if (n_j == 0) continue;  // contributes exactly zero
    score += lg_r - std::lgamma(static_cast<double>(n_j + r)) + inner;
  }
  return score;
}

namespace {

std::vector<std::size_t> resolve_ordering(const Dataset& data, const K2Config& config) {
  std::vector<std::size_t> order;
  if (config.ordering.empty()) {
    order.push_back(data.class_column());
    for (std::size_t c = 0; c < data.column_count(); ++c) {
      if (c != data.class_column()) order.push_back(c);
    }
    return order;
  }
  std::set<std::size_t> seen;
  for (const auto& name : config.ordering) {
    const auto idx = data.column_index(name);
    if (!idx) throw Error(ErrorCode::InvalidOrdering, "ordering names unknown column '" + name + "'");
    if (!seen.insert(*idx).second) {
      throw Error(ErrorCode::InvalidOrdering, "ordering repeats column '" + name + "'");
    }
    order.push_back(*idx);
  }
  if (order.size() != data.column_count()) {
    throw Error(ErrorCode::InvalidOrdering, "ordering must list every column exactly once");
  }
  if (config.start_naive && order.front() != data.class_column()) {
    throw Error(ErrorCode::InvalidOrdering, "naive start requires the class first in the ordering");
  }
  return order;
}

Network fit_on(const Dataset& data, std::vector<Edge> edges, double pseudocount) {
  NetworkStructure structure(variables_of(data), std::move(edges));
  const BoundData bound(structure, data);
  auto cpts = estimate_cpts(structure, bound, pseudocount);
  return Network(std::move(structure), std::move(cpts), data.class_column());
}

}  // namespace

NetworkStructure naive_bayes_structure(const Dataset& data) {
  std::vector<Edge> edges;
  for (std::size_t c = 0; c < data.column_count(); ++c) {
    if (c != data.class_column()) edges.push_back({data.class_column(), c});
  }
  return NetworkStructure(variables_of(data), std::move(edges));
}

Network learn_k2(const Dataset& data, const K2Config& config) {
  if (config.max_parents < 1) throw Error(ErrorCode::InvalidArgument, "max_parents must be >= 1");
  if (data.row_count() == 0) throw Error(ErrorCode::EmptyDataset, "dataset has no rows");
  const auto order = resolve_ordering(data, config);
  const std::size_t cls = data.class_column();

  std::vector<Edge> edges;
  if (config.start_naive) {
    for (std::size_t c = 0; c < data.column_count(); ++c) {
      if (c != cls) edges.push_back({cls, c});
    }
  }
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t node = order[pos];
    std::vector<std::size_t> parents;
    if (config.start_naive && node != cls) parents.push_back(cls);
    double current = k2_family_score(data, node, parents);
    while (parents.size() < config.max_parents) {
      std::optional<std::size_t> best;
      double best_score = current;
      for (std::size_t p = 0; p < pos; ++p) {
        const std::size_t z = order[p];
        if (std::find(parents.begin(), parents.end(), z) != parents.end()) continue;
        auto trial = parents;
        trial.push_back(z);
        std::sort(trial.begin(), trial.end());
        const double s = k2_family_score(data, node, trial);
        if (s > best_score) {
          best_score = s;
          best = z;
        }
      }
      if (!best) break;
      parents.push_back(*best);
      std::sort(parents.begin(), parents.end());
      edges.push_back({*best, node});
      current = best_score;
    }
  }
  return fit_on(data, std::move(edges), config.pseudocount);
}

MutualInfoTable conditional_mutual_info(const Dataset& data) {
  if (data.row_count() == 0) throw Error(ErrorCode::EmptyDataset, "dataset has no rows");
  const std::size_t cls = data.class_column();
  std::vector<std::size_t> attrs;
  for (std::size_t c = 0; c < data.column_count(); ++c) {
    if (c != cls) attrs.push_back(c);
  }
  if (attrs.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two attributes");
  const std::size_t n = attrs.size();
  const std::size_t rc = data.column(cls).states.size();
  std::vector<double> table(n * n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const std::size_t xi = attrs[i], xj = attrs[j];
      const std::size_t rx = data.column(xi).states.size();
      const std::size_t ry = data.column(xj).states.size();
      std::vector<double> nxyc(rx * ry * rc, 0.0), nxc(rx * rc, 0.0), nyc(ry * rc, 0.0), nc(rc, 0.0);
      double total = 0.0;
      for (std::size_t row = 0; row < data.row_count(); ++row) {
        const int x = data.cell(row, xi), y = data.cell(row, xj), c = data.cell(row, cls);
        if (x == kMissing || y == kMissing || c == kMissing) continue;
        const auto ux = static_cast<std::size_t>(x), uy = static_cast<std::size_t>(y),
                   uc = static_cast<std::size_t>(c);
        nxyc[(ux * ry + uy) * rc + uc] += 1.0;
        nxc[ux * rc + uc] += 1.0;
        nyc[uy * rc + uc] += 1.0;
        nc[uc] += 1.0;
        total += 1.0;
      }
      double info = 0.0;
      if (total > 0.0) {
        for (std::size_t x = 0; x < rx; ++x) {
          for (std::size_t y = 0; y < ry; ++y) {
            for (std::size_t c = 0; c < rc; ++c) {
              const double joint = nxyc[(x * ry + y) * rc + c];
              if (joint == 0.0) continue;
              info += joint / total * std::log(joint * nc[c] / (nxc[x * rc + c] * nyc[y * rc + c]));
            }
          }
        }
      }
      table[i * n + j] = info;
      table[j * n + i] = info;
    }
  }
  return MutualInfoTable(std::move(attrs), std::move(table));
}

Network learn_tan(const Dataset& data, const TanConfig& config) {
  const MutualInfoTable info = conditional_mutual_info(data);
  const auto& attrs = info.attributes();
  const std::size_t n = attrs.size();

  struct Candidate {
    double weight;
    std::string first, second;  // name pair, lexicographically ordered
    std::size_t i, j;
  };
  std::vector<Candidate> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::string a = data.column(attrs[i]).name, b = data.column(attrs[j]).name;
      if (b < a) std::swap(a, b);
      pairs.push_back({info(i, j), std::move(a), std::move(b), i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Candidate& l, const Candidate& r) {
    if (l.weight != r.weight) return l.weight > r.weight;
    return std::tie(l.first, l.second) < std::tie(r.first, r.second);
  });

  std::vector<std::size_t> root_of(n);
  std::iota(root_of.begin(), root_of.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (root_of[v] != v) v = root_of[v] = root_of[root_of[v]];
    return v;
  };
  std::vector<std::vector<std::size_t>> tree(n);
  for (const Candidate& c : pairs) {
    const std::size_t ri = find(c.i), rj = find(c.j);
    if (ri == rj) continue;
    root_of[ri] = rj;
    tree[c.i].push_back(c.j);
    tree[c.j].push_back(c.i);
  }
  for (auto& nb : tree) std::sort(nb.begin(), nb.end());

  std::vector<Edge> edges;
  for (std::size_t a : attrs) edges.push_back({data.class_column(), a});
  std::vector<bool> visited(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  visited[0] = true;
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (std::size_t w : tree[v]) {
      if (visited[w]) continue;
      visited[w] = true;
      edges.push_back({attrs[v], attrs[w]});
      frontier.push(w);
    }
  }
  return fit_on(data, std::move(edges), config.pseudocount);
}

}  // namespace expertbayes
