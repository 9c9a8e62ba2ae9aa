#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dbar/common.hpp"

namespace dbar {

/// A point of the closed polydisc: n complex coordinates, |coord| <= 1.
struct Point {
    std::vector<cplx> coords;

    Point() = default;
    explicit Point(std::vector<cplx> c) : coords(std::move(c)) {}
    Point(std::initializer_list<cplx> c) : coords(c) {}

    int dim() const { return static_cast<int>(coords.size()); }
    cplx& operator[](int j) { return coords[static_cast<std::size_t>(j)]; }
    const cplx& operator[](int j) const { return coords[static_cast<std::size_t>(j)]; }

    bool in_closed_polydisc(double slack = 1e-12) const {
        for (const cplx& c : coords)
            if (std::abs(c) > 1.0 + slack) return false;
        return true;
    }

    bool interior(double margin = 0.0) const {
        for (const cplx& c : coords)
            if (std::abs(c) >= 1.0 - margin) return false;
        return true;
    }

    Point displaced(int j, cplx dz) const {
        Point p = *this;
        p[j] += dz;
        return p;
    }

    Point with(int j, cplx value) const {
        Point p = *this;
        p[j] = value;
        return p;
    }
};

enum class Smoothness { HolomorphicComponent, Smooth, Hoelder, Unknown };

namespace detail {

/// Memo cache keyed by coordinates quantized at 1e-14. Sharded so concurrent
/// nested quadratures do not serialize on one mutex.
class PointMemo {
  public:
    bool lookup(const Point& p, cplx& out) const {
        Key k = make_key(p);
        Shard& s = shard(k);
        std::lock_guard<std::mutex> lock(s.mu);
        auto it = s.map.find(k);
        if (it == s.map.end()) return false;
        out = it->second;
        return true;
    }

    void store(const Point& p, cplx v) {
        Key k = make_key(p);
        Shard& s = shard(k);
        std::lock_guard<std::mutex> lock(s.mu);
        if (s.map.size() >= kShardCap) return;  // bound memory, keep correctness
        s.map.emplace(std::move(k), v);
    }

  private:
    using Key = std::vector<std::int64_t>;

    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::size_t h = 0xcbf29ce484222325ull;
            for (std::int64_t v : k) {
                h ^= static_cast<std::size_t>(v);
                h *= 0x100000001b3ull;
            }
            return h;
        }
    };

    struct Shard {
        mutable std::mutex mu;
        std::unordered_map<Key, cplx, KeyHash> map;
    };

    static Key make_key(const Point& p) {
        Key k;
        k.reserve(p.coords.size() * 2);
        for (const cplx& c : p.coords) {
            k.push_back(std::llround(c.real() * 1e14));
            k.push_back(std::llround(c.imag() * 1e14));
        }
        return k;
    }

    Shard& shard(const Key& k) const { return shards_[KeyHash{}(k) % kShards]; }

    static constexpr std::size_t kShards = 64;
    static constexpr std::size_t kShardCap = std::size_t(1) << 16;  // ~4M entries total
    mutable std::array<Shard, kShards> shards_;
};

}  // namespace detail

/// Evaluation oracle for a complex-valued function on the closed polydisc.
/// Evaluators must be total there; repeated evaluation at the same point is
/// bit-identical (the memo makes that so even for nondeterministic-cost
/// evaluators, and makes nested quadratures affordable).
class ScalarFunction {
  public:
    using Evaluator = std::function<cplx(const Point&)>;

    ScalarFunction() = default;
    ScalarFunction(Evaluator eval, int dim, Smoothness tag = Smoothness::Smooth,
                   bool memoize = false)
        : eval_(std::move(eval)),
          dim_(dim),
          tag_(tag),
          memo_(memoize ? std::make_shared<detail::PointMemo>() : nullptr) {}

    static ScalarFunction zero(int dim) {
        ScalarFunction f([](const Point&) { return cplx(0.0, 0.0); }, dim,
                         Smoothness::Smooth);
        f.identically_zero_ = true;
        return f;
    }

    static ScalarFunction constant(cplx c, int dim) {
        return ScalarFunction([c](const Point&) { return c; }, dim, Smoothness::Smooth);
    }

    cplx operator()(const Point& p) const {
        if (identically_zero_) return cplx(0.0, 0.0);
        if (memo_) {
            cplx v;
            if (memo_->lookup(p, v)) return v;
            v = eval_(p);
            memo_->store(p, v);
            return v;
        }
        return eval_(p);
    }

    /// Evaluate without consulting or filling the memo. For batch sweeps over
    /// huge one-shot node sets, where caching would only cost memory.
    cplx raw(const Point& p) const {
        if (identically_zero_) return cplx(0.0, 0.0);
        return eval_(p);
    }

    int dim() const { return dim_; }
    Smoothness smoothness() const { return tag_; }
    bool is_zero() const { return identically_zero_; }

    ScalarFunction memoized() const {
        ScalarFunction f = *this;
        if (!f.memo_ && !f.identically_zero_) f.memo_ = std::make_shared<detail::PointMemo>();
        return f;
    }

    /// Copy that does not share (or have) a memo. For inner quadrature loops
    /// whose node sets are too large and too rarely revisited to cache.
    ScalarFunction unmemoized() const {
        ScalarFunction f = *this;
        f.memo_.reset();
        return f;
    }

  private:
    Evaluator eval_;
    int dim_ = 0;
    Smoothness tag_ = Smoothness::Unknown;
    bool identically_zero_ = false;
    std::shared_ptr<detail::PointMemo> memo_;
};

/// A (0,1)-form g = sum_i g_i dzbar_i as n component oracles.
struct Form01 {
    std::vector<ScalarFunction> components;
    double alpha_class = 1.0;  // nominal Hoelder exponent of the datum

    int dim() const { return static_cast<int>(components.size()); }
    const ScalarFunction& operator[](int j) const {
        return components[static_cast<std::size_t>(j)];
    }
};

/// Freeze all coordinates but `free_index` (0-based) at `fixed`.
inline std::function<cplx(cplx)> slice(const ScalarFunction& f, const Point& fixed,
                                       int free_index) {
    if (free_index < 0 || free_index >= fixed.dim())
        throw std::invalid_argument("slice: free_index out of range");
    return [&f, fixed, free_index](cplx zeta) { return f(fixed.with(free_index, zeta)); };
}

/// Central-difference Wirtinger derivative d/dz_j (or d/dzbar_j with
/// `conjugate`). O(h^2) for smooth f; the stencil must stay in the closed
/// polydisc.
inline cplx wirtinger_fd(const ScalarFunction& f, const Point& z, int j, double h,
                         bool conjugate) {
    if (h <= 0.0) throw std::invalid_argument("wirtinger_fd: h must be positive");
    if (j < 0 || j >= z.dim()) throw std::invalid_argument("wirtinger_fd: index out of range");
    const Point stencil[4] = {z.displaced(j, cplx(h, 0.0)), z.displaced(j, cplx(-h, 0.0)),
                              z.displaced(j, cplx(0.0, h)), z.displaced(j, cplx(0.0, -h))};
    for (const Point& p : stencil)
        if (!p.in_closed_polydisc())
            throw StencilOutOfDomainError("wirtinger_fd: stencil exits the closed polydisc");
    cplx dre = f(stencil[0]) - f(stencil[1]);
    cplx dim = f(stencil[2]) - f(stencil[3]);
    cplx i(0.0, 1.0);
    return conjugate ? (dre + i * dim) / (4.0 * h) : (dre - i * dim) / (4.0 * h);
}

/// Max over points and index pairs (i,j) of |dbar_j g_i - dbar_i g_j|.
/// Zero residual (up to FD error) certifies dbar-closedness; n=1 is vacuous.
inline double check_dbar_closed(const Form01& g, const std::vector<Point>& points, double h) {
    double residual = 0.0;
    int n = g.dim();
    for (const Point& z : points) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                cplx a = wirtinger_fd(g[i], z, j, h, true);
                cplx b = wirtinger_fd(g[j], z, i, h, true);
                residual = std::max(residual, std::abs(a - b));
            }
        }
    }
    return residual;
}

}  // namespace dbar
