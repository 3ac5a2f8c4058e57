#pragma once

#include <set>

#include "grassmann.hpp"
#include "rng.hpp"

namespace fdgff {

// Battery parameters for the nullity semi-decision procedure: evaluate
// <ev_center(P) * distant insertions> over K configurations at two domain
// sizes; "null" is evidence, "not-null" is proof.
struct NullBattery {
    int size1 = 24;
    int size2 = 40;
    int configs = 12;
    int min_separation = 8;
    double tolerance = 1e-8;
    uint64_t seed = 0x5eedf1e1dULL;
};

struct NullVerdict {
    bool null = true;
    // witness for a not-null verdict
    double witness_value = 0.0;
    int witness_domain = 0;
    int witness_config = -1;

    explicit operator bool() const { return null; }
};

namespace detail {

struct NullDomain {
    DiscreteDomain domain;
    DirichletGreen green;
    explicit NullDomain(int size) : domain(domain_square(size + 1)), green(domain) {}
};

inline const NullDomain& null_domain(int size) {
    static std::map<int, std::unique_ptr<NullDomain>> cache;
    auto it = cache.find(size);
    if (it == cache.end()) it = cache.emplace(size, std::make_unique<NullDomain>(size)).first;
    return *it->second;
}

}  // namespace detail

// Tests nullity of P: for every domain size and configuration of distant
// balanced insertions (plus surplus singles covering the species imbalances
// present in P), |<ev_center(P) * insertions>| must fall below the tolerance.
inline NullVerdict is_null(const PolyD& p, const NullBattery& battery = {}) {
    NullVerdict verdict;
    if (p.is_zero()) return verdict;

    // species imbalances present in P's monomials
    std::set<int> imbalances;
    for (auto& [m, c] : p.terms()) {
        int bal = 0;
        for (uint64_t k : m) bal += Generator::from_key(k).species == Species::xi ? 1 : -1;
        imbalances.insert(bal);
    }

    int supp = p.support_radius();
    int size1 = battery.size1, size2 = battery.size2;
    int need = 2 * (supp + battery.min_separation) + 4;
    if (need > size1) {
        size2 = size2 + (need - size1);
        size1 = need;
    }

    SplitMix rng(battery.seed);
    int config_id = 0;
    for (int domain_size : {size1, size2}) {
        const auto& nd = detail::null_domain(domain_size);
        Vertex center{(domain_size + 1) / 2, (domain_size + 1) / 2};
        CorrelationEngine eng(nd.green, 64);
        for (int cfg = 0; cfg < battery.configs; ++cfg, ++config_id) {
            int pairs = 1 + int(rng.next() % 2);
            // cycle through the imbalances that need probing
            int surplus = 0;
            if (!imbalances.empty()) {
                auto it = imbalances.begin();
                std::advance(it, cfg % (int)imbalances.size());
                surplus = -*it;
            }
            // place insertion points in the ring far from the center
            std::vector<Vertex> pts;
            int attempts = 0;
            int needed = 2 * pairs + std::abs(surplus);
            while ((int)pts.size() < needed && attempts < 4000) {
                ++attempts;
                Vertex v{1 + int(rng.next() % (uint64_t)(domain_size - 1)),
                         1 + int(rng.next() % (uint64_t)(domain_size - 1))};
                int dc = std::max(std::abs(v.x - center.x), std::abs(v.y - center.y));
                if (dc < supp + battery.min_separation) continue;
                bool ok = true;
                for (const Vertex& u : pts)
                    if (std::abs(u.x - v.x) + std::abs(u.y - v.y) < battery.min_separation)
                        ok = false;
                if (ok) pts.push_back(v);
            }
            if ((int)pts.size() < needed) continue;  // geometry too tight; skip config
            PolyD ins = PolyD::scalar(1.0);
            size_t idx = 0;
            for (int i = 0; i < pairs; ++i) {
                ins = ins * PolyD::generator(gen_xi(pts[idx].x, pts[idx].y), 1.0);
                ++idx;
                ins = ins * PolyD::generator(gen_theta(pts[idx].x, pts[idx].y), 1.0);
                ++idx;
            }
            for (int s = 0; s < std::abs(surplus); ++s) {
                Generator g = surplus > 0 ? gen_xi(pts[idx].x, pts[idx].y)
                                          : gen_theta(pts[idx].x, pts[idx].y);
                ins = ins * PolyD::generator(g, 1.0);
                ++idx;
            }
            PolyD full = evaluate(p, center, nd.domain) * ins;
            cplx v = eng.value(full);
            if (std::abs(v) >= battery.tolerance) {
                verdict.null = false;
                verdict.witness_value = std::abs(v);
                verdict.witness_domain = domain_size;
                verdict.witness_config = config_id;
                return verdict;
            }
        }
    }
    return verdict;
}

}  // namespace fdgff
