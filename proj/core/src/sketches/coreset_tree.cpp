// Copyright 2026 The SDE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sde/sketches/coreset_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sde {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

// One node of the sampling tree: a set of point indices and a representative.
struct TreeNode {
    std::vector<std::size_t> members;
    std::size_t rep = 0;         // index into the point set
    double cost = 0;             // sum of w * d^2 to the representative
    int left = -1, right = -1;   // children (indices into the node pool)

    bool leaf() const noexcept { return left < 0; }
};

}  // namespace

CoreSetTree::CoreSetTree(const std::map<std::string, double>& params,
                         const std::vector<std::uint64_t>& seeds)
    : Synopsis(SynopsisKind::CoreSetTree, kind_name(SynopsisKind::CoreSetTree), params, seeds),
      rng_(seed_at(2)) {
    bucket_size_ = static_cast<std::size_t>(this->params().at("bucketSize"));
    dimension_ = static_cast<std::size_t>(this->params().at("dimension"));
}

std::unique_ptr<Synopsis> CoreSetTree::clone() const {
    return std::make_unique<CoreSetTree>(*this);
}

std::vector<WeightedPoint> CoreSetTree::reduce(std::vector<WeightedPoint> points,
                                               SplitMix& rng) const {
    if (points.size() <= bucket_size_) return points;

    std::vector<TreeNode> nodes;
    nodes.reserve(2 * bucket_size_);
    TreeNode root;
    root.members.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) root.members[i] = i;

    // root representative: weight-proportional draw
    double total_w = 0;
    for (const auto& p : points) total_w += p.weight;
    double pick = rng.next_unit() * total_w;
    root.rep = points.size() - 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
        pick -= points[i].weight;
        if (pick <= 0) {
            root.rep = i;
            break;
        }
    }
    for (std::size_t i : root.members) {
        root.cost += points[i].weight * sq_dist(points[i].coords, points[root.rep].coords);
    }
    nodes.push_back(std::move(root));

    std::vector<std::size_t> reps{nodes[0].rep};
    while (reps.size() < bucket_size_) {
        // descend by cost to a leaf
        int node = 0;
        while (!nodes[node].leaf()) {
            double lc = nodes[nodes[node].left].cost;
            double rc = nodes[nodes[node].right].cost;
            if (lc + rc <= 0) break;
            node = (rng.next_unit() * (lc + rc) < lc) ? nodes[node].left : nodes[node].right;
        }
        TreeNode& leaf = nodes[node];
        if (leaf.cost <= 0 || leaf.members.size() < 2) break;  // nothing left to split

        // new representative: D^2 draw inside the leaf
        double d2pick = rng.next_unit() * leaf.cost;
        std::size_t candidate = leaf.members.front();
        for (std::size_t i : leaf.members) {
            if (i == leaf.rep) continue;
            d2pick -= points[i].weight * sq_dist(points[i].coords, points[leaf.rep].coords);
            candidate = i;
            if (d2pick <= 0) break;
        }
        if (candidate == leaf.rep) break;

        TreeNode left, right;
        left.rep = leaf.rep;
        right.rep = candidate;
        for (std::size_t i : leaf.members) {
            double to_old = sq_dist(points[i].coords, points[left.rep].coords);
            double to_new = sq_dist(points[i].coords, points[right.rep].coords);
            if (to_new < to_old) {
                right.members.push_back(i);
                right.cost += points[i].weight * to_new;
            } else {
                left.members.push_back(i);
                left.cost += points[i].weight * to_old;
            }
        }
        int li = static_cast<int>(nodes.size());
        nodes.push_back(std::move(left));
        int ri = static_cast<int>(nodes.size());
        nodes.push_back(std::move(right));
        nodes[node].left = li;
        nodes[node].right = ri;
        nodes[node].members.clear();
        // refresh ancestor costs bottom-up (tree is tiny: walk all inner nodes)
        for (int n = static_cast<int>(nodes.size()) - 1; n >= 0; --n) {
            if (!nodes[n].leaf()) nodes[n].cost = nodes[nodes[n].left].cost + nodes[nodes[n].right].cost;
        }
        reps.push_back(candidate);
    }

    // weight every representative by its leaf's total weight
    std::vector<WeightedPoint> out;
    out.reserve(reps.size());
    for (const TreeNode& node : nodes) {
        if (!node.leaf()) continue;
        double w = 0;
        for (std::size_t i : node.members) w += points[i].weight;
        if (w <= 0) continue;
        out.push_back({points[node.rep].coords, w});
    }
    return out;
}

void CoreSetTree::carry_up(std::vector<WeightedPoint> coreset, std::size_t level) {
    while (true) {
        if (buckets_.size() <= level) buckets_.resize(level + 1);
        if (buckets_[level].empty()) {
            buckets_[level] = std::move(coreset);
            return;
        }
        std::vector<WeightedPoint> merged = std::move(buckets_[level]);
        buckets_[level].clear();
        merged.insert(merged.end(), std::make_move_iterator(coreset.begin()),
                      std::make_move_iterator(coreset.end()));
        coreset = reduce(std::move(merged), rng_);
        ++level;
    }
}

void CoreSetTree::add_point(std::vector<double> coords, double weight) {
    if (coords.size() != dimension_) {
        throw SdeError(ErrorCode::TypeError, "coreset: point dimensionality mismatch");
    }
    staging_.push_back({std::move(coords), weight});
    if (staging_.size() >= bucket_size_) {
        carry_up(std::move(staging_), 0);
        staging_.clear();
    }
}

std::vector<WeightedPoint> CoreSetTree::coreset() const {
    std::vector<WeightedPoint> all = staging_;
    for (const auto& bucket : buckets_) {
        all.insert(all.end(), bucket.begin(), bucket.end());
    }
    if (all.size() > bucket_size_) {
        SplitMix rng(seed_at(3) ^ items_seen());
        all = reduce(std::move(all), rng);
    }
    return all;
}

void CoreSetTree::do_add(const StreamRecord& record, const std::vector<std::size_t>& fields) {
    std::vector<double> coords;
    coords.reserve(fields.size());
    for (std::size_t f : fields) coords.push_back(number_at(record, f));
    add_point(std::move(coords));
}

EstimateValue CoreSetTree::do_estimate(const Query& query) const {
    if (!std::holds_alternative<CoresetQuery>(query)) query_mismatch("coreset");
    return coreset();
}

void CoreSetTree::do_merge(const Synopsis& other) {
    const auto& o = static_cast<const CoreSetTree&>(other);
    for (std::size_t level = 0; level < o.buckets_.size(); ++level) {
        if (!o.buckets_[level].empty()) carry_up(o.buckets_[level], level);
    }
    for (const auto& p : o.staging_) {
        staging_.push_back(p);
        if (staging_.size() >= bucket_size_) {
            carry_up(std::move(staging_), 0);
            staging_.clear();
        }
    }
}

void CoreSetTree::write_payload(FrameWriter& w) const {
    auto write_points = [&](const std::vector<WeightedPoint>& pts) {
        w.varint(pts.size());
        for (const auto& p : pts) {
            for (double c : p.coords) w.f64(c);
            w.f64(p.weight);
        }
    };
    w.u64(rng_.state());
    write_points(staging_);
    w.varint(buckets_.size());
    for (const auto& bucket : buckets_) write_points(bucket);
}

void CoreSetTree::read_payload(FrameReader& r) {
    auto read_points = [&](std::vector<WeightedPoint>& pts) {
        pts.resize(r.varint());
        for (auto& p : pts) {
            p.coords.resize(dimension_);
            for (double& c : p.coords) c = r.f64();
            p.weight = r.f64();
        }
    };
    rng_.set_state(r.u64());
    read_points(staging_);
    buckets_.resize(r.varint());
    for (auto& bucket : buckets_) read_points(bucket);
}

}  // namespace sde
