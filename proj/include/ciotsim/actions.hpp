#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace ciot {

// One decoded action: the share/no-share flag plus the cached content sets.
// Item indices are 1-based; B_p and B_s are kept sorted ascending. The
// bitmasks mirror the sets for O(1) membership tests on the hot path.
struct Action {
    int index = -1;
    bool I_t = false;
    std::vector<int> B_p;
    std::vector<int> B_s;
    std::uint64_t mask_p = 0;
    std::uint64_t mask_s = 0;

    bool caches_pu(int item) const { return (mask_p >> (item - 1)) & 1u; }
    bool caches_su(int item) const { return (mask_s >> (item - 1)) & 1u; }
};

inline std::uint64_t items_mask(const std::vector<int>& items) {
    std::uint64_t m = 0;
    for (int i : items) m |= std::uint64_t{1} << (i - 1);
    return m;
}

// pu_hit iff d_p is cached, su_hit iff d_s is cached.
inline std::pair<bool, bool> satisfies_requests(const Action& a, int d_p, int d_s) {
    return {a.caches_pu(d_p), a.caches_su(d_s)};
}

// The dense, deterministically ordered action space.
//
// Share scheme: family (a) keeps the whole cache for own content
// (I_t = 0, |B_s| = C_s) and family (b) splits it evenly between PU and own
// content (I_t = 1, |B_p| = |B_s| = C_s / 2). The non-cooperative scheme has
// family (a) only. Actions are ordered lexicographically by (I_t, B_p, B_s),
// so index 0 is the smallest no-share placement.
class ActionTable {
public:
    static ActionTable enumerate(int M, int N, int C_s, bool cooperative) {
        if (M < 1 || N < 1 || M > 63 || N > 63)
            throw std::invalid_argument("action table: catalog sizes must lie in [1, 63]");
        if (C_s < 1 || C_s > M + N)
            throw std::invalid_argument("action table: C_s must lie in [1, M + N]");
        if (cooperative && C_s % 2 != 0)
            throw std::invalid_argument("action table: cooperative scheme requires an even C_s");

        ActionTable t;
        // family (a): I_t = 0, all size-C_s subsets of the own catalog
        if (C_s <= N) {
            for (const auto& bs : k_subsets(N, C_s)) {
                Action a;
                a.I_t = false;
                a.B_s = bs;
                t.push(std::move(a));
                ++t.n_no_share_;
            }
        }
        // family (b): I_t = 1, even split of the cache
        if (cooperative) {
            int half = C_s / 2;
            if (half <= M && half <= N) {
                auto su_subsets = k_subsets(N, half);
                for (const auto& bp : k_subsets(M, half)) {
                    for (const auto& bs : su_subsets) {
                        Action a;
                        a.I_t = true;
                        a.B_p = bp;
                        a.B_s = bs;
                        t.push(std::move(a));
                        ++t.n_share_;
                    }
                }
            }
        }
        if (t.actions_.empty())
            throw std::invalid_argument("action table: no feasible cache placement");
        return t;
    }

    int size() const { return static_cast<int>(actions_.size()); }
    const Action& operator[](int i) const { return actions_[static_cast<size_t>(i)]; }

    const Action& decode(int index) const {
        if (index < 0 || index >= size())
            throw std::out_of_range("action table: index out of range");
        return actions_[static_cast<size_t>(index)];
    }

    int encode(bool I_t, const std::vector<int>& B_p, const std::vector<int>& B_s) const {
        auto it = lookup_.find(key(I_t, items_mask(B_p), items_mask(B_s)));
        if (it == lookup_.end())
            throw std::out_of_range("action table: unknown (I_t, B_p, B_s) triple");
        return it->second;
    }

    int count_no_share() const { return n_no_share_; }
    int count_share() const { return n_share_; }

    // all size-k subsets of {1..n} in lexicographic order
    static std::vector<std::vector<int>> k_subsets(int n, int k) {
        std::vector<std::vector<int>> out;
        if (k > n) return out;
        std::vector<int> cur(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) cur[static_cast<size_t>(i)] = i + 1;
        while (true) {
            out.push_back(cur);
            int i = k - 1;
            while (i >= 0 && cur[static_cast<size_t>(i)] == n - (k - 1 - i)) --i;
            if (i < 0) break;
            ++cur[static_cast<size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                cur[static_cast<size_t>(j)] = cur[static_cast<size_t>(j - 1)] + 1;
        }
        return out;
    }

private:
    using Key = std::tuple<int, std::uint64_t, std::uint64_t>;
    static Key key(bool I_t, std::uint64_t mp, std::uint64_t ms) {
        return {I_t ? 1 : 0, mp, ms};
    }

    void push(Action a) {
        a.index = size();
        a.mask_p = items_mask(a.B_p);
        a.mask_s = items_mask(a.B_s);
        lookup_.emplace(key(a.I_t, a.mask_p, a.mask_s), a.index);
        actions_.push_back(std::move(a));
    }

    std::vector<Action> actions_;
    std::map<Key, int> lookup_;
    int n_no_share_ = 0;
    int n_share_ = 0;
};

}  // namespace ciot
