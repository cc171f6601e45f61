#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dworklab {

// Axis-aligned boxes in R^d stored flat; id is the originating box (pieces of a split box share it).
struct BoxList {
    std::size_t d = 0;
    std::vector<long double> lo, hi;
    std::vector<std::size_t> id;

    explicit BoxList(std::size_t dim = 0) : d(dim) {}
    std::size_t size() const { return id.size(); }
    void add(const long double* l, const long double* h, std::size_t origin) {
        lo.insert(lo.end(), l, l + d);
        hi.insert(hi.end(), h, h + d);
        id.push_back(origin);
    }
    long double volume(std::size_t i) const {
        long double v = 1;
        for (std::size_t j = 0; j < d; ++j) v *= hi[i * d + j] - lo[i * d + j];
        return v;
    }
};

namespace detail {

// Split a box on the torus [0, period)^d into at most 2^d pieces inside the fundamental domain.
inline void add_wrapped(BoxList& out, std::vector<long double> l, std::vector<long double> h, std::size_t origin,
                        long double period) {
    std::size_t d = out.d;
    for (std::size_t j = 0; j < d; ++j) {
        if (h[j] - l[j] >= period) {
            l[j] = 0;
            h[j] = period;
            continue;
        }
        long double shift = std::floor(l[j] / period) * period;
        l[j] -= shift;
        h[j] -= shift;
        if (h[j] > period) {
            auto l2 = l, h2 = h;
            h[j] = period;
            l2[j] = 0;
            h2[j] -= period;
            add_wrapped(out, l, h, origin, period);
            add_wrapped(out, l2, h2, origin, period);
            return;
        }
    }
    out.add(l.data(), h.data(), origin);
}

inline long double union_1d(std::vector<std::pair<long double, long double>> iv) {
    std::sort(iv.begin(), iv.end());
    long double total = 0, cur_lo = 0, cur_hi = 0;
    bool open = false;
    for (auto [a, b] : iv) {
        if (b <= a) continue;
        if (!open || a > cur_hi) {
            if (open) total += cur_hi - cur_lo;
            cur_lo = a;
            cur_hi = b;
            open = true;
        } else {
            cur_hi = std::max(cur_hi, b);
        }
    }
    if (open) total += cur_hi - cur_lo;
    return total;
}

// Area of a union of rectangles (x0, x1, y0, y1): sweep in x with a cover-count segment tree on y.
struct Rect {
    long double x0, x1, y0, y1;
};

inline long double union_2d(const std::vector<Rect>& rects) {
    if (rects.empty()) return 0;
    std::vector<long double> ys;
    ys.reserve(2 * rects.size());
    for (const auto& r : rects)
        if (r.x1 > r.x0 && r.y1 > r.y0) {
            ys.push_back(r.y0);
            ys.push_back(r.y1);
        }
    if (ys.empty()) return 0;
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    std::size_t segs = ys.size() - 1;
    if (segs == 0) return 0;
    struct Event {
        long double x;
        int delta;
        std::size_t a, b;
    };
    std::vector<Event> ev;
    ev.reserve(2 * rects.size());
    for (const auto& r : rects) {
        if (!(r.x1 > r.x0 && r.y1 > r.y0)) continue;
        std::size_t a = std::lower_bound(ys.begin(), ys.end(), r.y0) - ys.begin();
        std::size_t b = std::lower_bound(ys.begin(), ys.end(), r.y1) - ys.begin();
        ev.push_back({r.x0, +1, a, b});
        ev.push_back({r.x1, -1, a, b});
    }
    std::sort(ev.begin(), ev.end(), [](const Event& p, const Event& q) { return p.x < q.x; });
    std::vector<int> cnt(4 * segs, 0);
    std::vector<long double> len(4 * segs, 0);
    auto update = [&](auto&& self, std::size_t node, std::size_t l, std::size_t r, std::size_t a, std::size_t b,
                      int delta) -> void {
        if (b <= l || r <= a) return;
        if (a <= l && r <= b) {
            cnt[node] += delta;
        } else {
            std::size_t mid = (l + r) / 2;
            self(self, 2 * node, l, mid, a, b, delta);
            self(self, 2 * node + 1, mid, r, a, b, delta);
        }
        if (cnt[node] > 0)
            len[node] = ys[r] - ys[l];
        else if (r - l == 1)
            len[node] = 0;
        else
            len[node] = len[2 * node] + len[2 * node + 1];
    };
    long double area = 0;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (i > 0) area += len[1] * (ev[i].x - ev[i - 1].x);
        update(update, 1, 0, segs, ev[i].a, ev[i].b, ev[i].delta);
    }
    return area;
}

}  // namespace detail

// Exact (up to rounding) Lebesgue measure of the union for d <= 3.
inline long double union_measure(const BoxList& boxes) {
    std::size_t d = boxes.d, n = boxes.size();
    if (n == 0) return 0;
    if (d == 1) {
        std::vector<std::pair<long double, long double>> iv(n);
        for (std::size_t i = 0; i < n; ++i) iv[i] = {boxes.lo[i], boxes.hi[i]};
        return detail::union_1d(std::move(iv));
    }
    if (d == 2) {
        std::vector<detail::Rect> rects(n);
        for (std::size_t i = 0; i < n; ++i)
            rects[i] = {boxes.lo[2 * i], boxes.hi[2 * i], boxes.lo[2 * i + 1], boxes.hi[2 * i + 1]};
        return detail::union_2d(rects);
    }
    if (d != 3) throw std::invalid_argument("exact union only for d <= 3");
    // Sweep the first axis; each elementary slab is a 2-d union of the active boxes.
    std::vector<std::pair<long double, std::size_t>> ev;  // index*2 + (0 start, 1 end)
    for (std::size_t i = 0; i < n; ++i) {
        if (boxes.hi[3 * i] <= boxes.lo[3 * i]) continue;
        ev.push_back({boxes.lo[3 * i], 2 * i});
        ev.push_back({boxes.hi[3 * i], 2 * i + 1});
    }
    std::sort(ev.begin(), ev.end());
    std::vector<std::size_t> active;
    std::vector<std::size_t> pos(n, 0);
    long double total = 0;
    for (std::size_t e = 0; e < ev.size();) {
        long double x = ev[e].first;
        while (e < ev.size() && ev[e].first == x) {
            std::size_t i = ev[e].second / 2;
            if (ev[e].second % 2 == 0) {
                pos[i] = active.size();
                active.push_back(i);
            } else {
                std::size_t p = pos[i];
                active[p] = active.back();
                pos[active[p]] = p;
                active.pop_back();
            }
            ++e;
        }
        if (e == ev.size() || active.empty()) continue;
        long double width = ev[e].first - x;
        std::vector<detail::Rect> rects;
        rects.reserve(active.size());
        for (auto i : active) rects.push_back({boxes.lo[3 * i + 1], boxes.hi[3 * i + 1], boxes.lo[3 * i + 2], boxes.hi[3 * i + 2]});
        total += width * detail::union_2d(rects);
    }
    return total;
}

// Boxes bucketed by the cell of their lower corner; cells are at least as wide as every box,
// so overlapping boxes sit in adjacent cells.
class BoxGrid {
public:
    explicit BoxGrid(const BoxList& b) : b_(b), cell_(b.d, 0) {
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = 0; j < b.d; ++j) cell_[j] = std::max(cell_[j], b.hi[i * b.d + j] - b.lo[i * b.d + j]);
        for (auto& c : cell_)
            if (c <= 0) c = 1;
        for (std::size_t i = 0; i < b.size(); ++i) grid_[key(&b.lo[i * b.d])].push_back(i);
    }

    // Pairs of distinct originating boxes with overlap of positive measure.
    std::size_t overlapping_pairs() const {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < b_.size(); ++i)
            visit_neighbors(cells_of(&b_.lo[i * b_.d]), 1, [&](std::size_t j) {
                if (j <= i || b_.id[i] == b_.id[j]) return;
                for (std::size_t t = 0; t < b_.d; ++t)
                    if (!(b_.lo[i * b_.d + t] < b_.hi[j * b_.d + t] && b_.lo[j * b_.d + t] < b_.hi[i * b_.d + t])) return;
                pairs.push_back(std::minmax(b_.id[i], b_.id[j]));
            });
        std::sort(pairs.begin(), pairs.end());
        return static_cast<std::size_t>(std::unique(pairs.begin(), pairs.end()) - pairs.begin());
    }

    bool contains(const long double* p) const {
        bool hit = false;
        std::vector<long> c = cells_of(p);
        for (auto& v : c) --v;  // a box holding p has its lower corner in cell(p) or one below
        visit_neighbors(c, 0, [&](std::size_t j) {
            if (hit) return;
            for (std::size_t t = 0; t < b_.d; ++t)
                if (!(b_.lo[j * b_.d + t] <= p[t] && p[t] < b_.hi[j * b_.d + t])) return;
            hit = true;
        });
        return hit;
    }

private:
    std::vector<long> cells_of(const long double* p) const {
        std::vector<long> c(b_.d);
        for (std::size_t j = 0; j < b_.d; ++j) c[j] = static_cast<long>(std::floor(p[j] / cell_[j]));
        return c;
    }
    std::uint64_t key(const long double* p) const { return pack(cells_of(p)); }
    static std::uint64_t pack(const std::vector<long>& c) {
        std::uint64_t h = 1469598103934665603ull;
        for (long v : c) h = (h ^ static_cast<std::uint64_t>(v + (1l << 20))) * 1099511628211ull;
        return h;
    }
    // low = 1: offsets in {-1, 0, 1}; low = 0: offsets in {0, 1} from the given base.
    template <class Fn>
    void visit_neighbors(const std::vector<long>& base, int low, Fn&& fn) const {
        std::size_t d = b_.d, span = low ? 3 : 2, total = 1;
        for (std::size_t j = 0; j < d; ++j) total *= span;
        std::vector<long> c(d);
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t x = code;
            for (std::size_t j = 0; j < d; ++j) {
                c[j] = base[j] + static_cast<long>(x % span) - low;
                x /= span;
            }
            auto it = grid_.find(pack(c));
            if (it == grid_.end()) continue;
            for (auto j : it->second) fn(j);
        }
    }

    const BoxList& b_;
    std::vector<long double> cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;
};

struct MonteCarloMeasure {
    long double measure = 0;
    long double stderr_ = 0;
};

// Uniform samples over [0, period)^d.
inline MonteCarloMeasure monte_carlo_union(const BoxList& boxes, long double period, std::uint64_t samples,
                                           std::uint64_t seed) {
    BoxGrid grid(boxes);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<long double> p(boxes.d);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (auto& v : p) v = u(rng) * period;
        if (grid.contains(p.data())) ++hits;
    }
    long double vol = std::pow(period, static_cast<long double>(boxes.d));
    long double f = static_cast<long double>(hits) / samples;
    return {vol * f, vol * std::sqrt(f * (1 - f) / samples)};
}

}  // namespace dworklab
