/*
 * Copyright 2026 The obfusc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "obfusc/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "json.hpp"
#include "obfusc/error.hpp"
#include "obfusc/rng.hpp"

namespace obfusc {

double performance_drop(double original_f1, double obf_f1) {
    return std::round((original_f1 - obf_f1) * 1e12) / 1e12;
}

namespace {

// Dip in count units (multiply by 1/(2n) for the statistic). `x` is sorted
// and 1-based: x[0] is unused.
double dip_counts(const std::vector<double>& x, int n) {
    double dip = 1.0;
    if (n < 2 || x[n] == x[1]) return dip;

    std::vector<int> mn(n + 1), mj(n + 1), gcm(n + 1), lcm(n + 1);

    // Greatest convex minorant pointers.
    mn[1] = 1;
    for (int j = 2; j <= n; ++j) {
        mn[j] = j - 1;
        for (;;) {
            const int mnj = mn[j];
            const int mnmnj = mn[mnj];
            if (mnj == 1 || (x[j] - x[mnj]) * (mnj - mnmnj) < (x[mnj] - x[mnmnj]) * (j - mnj)) break;
            mn[j] = mnmnj;
        }
    }
    // Least concave majorant pointers.
    mj[n] = n;
    for (int k = n - 1; k >= 1; --k) {
        mj[k] = k + 1;
        for (;;) {
            const int mjk = mj[k];
            const int mjmjk = mj[mjk];
            if (mjk == n || (x[k] - x[mjk]) * (mjk - mjmjk) < (x[mjk] - x[mjmjk]) * (k - mjk)) break;
            mj[k] = mjmjk;
        }
    }

    int low = 1, high = n;
    for (;;) {
        int l_gcm = 1;
        gcm[1] = high;
        while (gcm[l_gcm] > low) {
            gcm[l_gcm + 1] = mn[gcm[l_gcm]];
            ++l_gcm;
        }
        int l_lcm = 1;
        lcm[1] = low;
        while (lcm[l_lcm] < high) {
            lcm[l_lcm + 1] = mj[lcm[l_lcm]];
            ++l_lcm;
        }

        // Largest distance between GCM and LCM on [low, high].
        int ig = l_gcm, ih = l_lcm;
        int ix = l_gcm - 1, iv = 2;
        double d = 0.0;
        if (l_gcm != 2 || l_lcm != 2) {
            do {
                const int gcmix = gcm[ix];
                const int lcmiv = lcm[iv];
                if (gcmix > lcmiv) {
                    const int gcmi1 = gcm[ix + 1];
                    const double dx = (lcmiv - gcmi1 + 1) -
                                      (x[lcmiv] - x[gcmi1]) * (gcmix - gcmi1) / (x[gcmix] - x[gcmi1]);
                    ++iv;
                    if (dx >= d) {
                        d = dx;
                        ig = ix + 1;
                        ih = iv - 1;
                    }
                } else {
                    const int lcmiv1 = lcm[iv - 1];
                    const double dx = (x[gcmix] - x[lcmiv1]) * (lcmiv - lcmiv1) / (x[lcmiv] - x[lcmiv1]) -
                                      (gcmix - lcmiv1 - 1);
                    --ix;
                    if (dx >= d) {
                        d = dx;
                        ig = ix + 1;
                        ih = iv;
                    }
                }
                ix = std::max(ix, 1);
                iv = std::min(iv, l_lcm);
            } while (gcm[ix] != lcm[iv]);
        } else {
            d = 1.0;
        }
        if (d < dip) break;

        double dip_l = 0.0;
        for (int j = ig; j < l_gcm; ++j) {
            double max_t = 1.0;
            const int j_ = gcm[j], j1 = gcm[j + 1];
            if (j_ - j1 > 1 && x[j_] != x[j1]) {
                const double c = (j_ - j1) / (x[j_] - x[j1]);
                for (int jj = j1; jj <= j_; ++jj) max_t = std::max(max_t, (jj - j1 + 1) - (x[jj] - x[j1]) * c);
            }
            dip_l = std::max(dip_l, max_t);
        }
        double dip_u = 0.0;
        for (int k = ih; k < l_lcm; ++k) {
            double max_t = 1.0;
            const int k_ = lcm[k], k1 = lcm[k + 1];
            if (k1 - k_ > 1 && x[k1] != x[k_]) {
                const double c = (k1 - k_) / (x[k1] - x[k_]);
                for (int kk = k_; kk <= k1; ++kk) max_t = std::max(max_t, (x[kk] - x[k_]) * c - (kk - k_ - 1));
            }
            dip_u = std::max(dip_u, max_t);
        }
        dip = std::max({dip, dip_l, dip_u});

        if (low == gcm[ig] && high == lcm[ih]) break;
        low = gcm[ig];
        high = lcm[ih];
    }
    return dip;
}

double dip_sorted(std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    if (n <= 3) return 1.0 / (2.0 * n);
    std::sort(x.begin(), x.end());
    std::vector<double> a(n + 1), b(n + 1);
    for (int i = 0; i < n; ++i) {
        a[i + 1] = x[i];
        b[i + 1] = -x[n - 1 - i];
    }
    // The statistic is reflection-symmetric; evaluating both orientations
    // makes dip(-x) == dip(x) hold bit-for-bit.
    return std::max(dip_counts(a, n), dip_counts(b, n)) / (2.0 * n);
}

}  // namespace

double dip_statistic(std::span<const double> samples) {
    if (samples.empty()) throw DataError("dip statistic of an empty sample");
    for (double v : samples) {
        if (!std::isfinite(v)) throw DataError("dip statistic: non-finite sample value");
    }
    std::vector<double> x(samples.begin(), samples.end());
    return dip_sorted(x);
}

DipResult dip_pvalue(std::span<const double> samples, int n_boot, std::uint64_t seed, unsigned threads) {
    if (n_boot < kMinBoot) {
        throw UserError("dip test needs n_boot >= " + std::to_string(kMinBoot) + ", got " +
                        std::to_string(n_boot));
    }
    DipResult r;
    r.n = samples.size();
    r.n_boot = n_boot;
    r.seed = seed;
    r.dip = dip_statistic(samples);
    if (r.n < 4) {
        r.degenerate = true;
        r.p_value = 1.0;
        return r;
    }

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n_boot));
    std::atomic<int> next{0};
    std::atomic<int> exceed{0};
    auto worker = [&] {
        std::vector<double> buf(r.n);
        int local = 0;
        for (int b; (b = next.fetch_add(1)) < n_boot;) {
            Rng rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(b + 1)));
            for (auto& v : buf) v = rng.uniform();
            if (dip_sorted(buf) >= r.dip) ++local;
        }
        exceed += local;
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    r.p_value = (1.0 + exceed.load()) / (1.0 + n_boot);
    return r;
}

std::string dips_to_json(const std::vector<DipResult>& dips) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : dips) {
        arr.push_back({{"llm", d.llm},
                       {"verifier", d.verifier},
                       {"condition", d.condition},
                       {"n", d.n},
                       {"dip", d.dip},
                       {"p_value", d.p_value},
                       {"n_boot", d.n_boot},
                       {"seed", d.seed},
                       {"degenerate", d.degenerate}});
    }
    return arr.dump(2);
}

std::vector<DipResult> dips_from_json(std::string_view json_text) {
    std::vector<DipResult> out;
    try {
        for (const auto& j : nlohmann::json::parse(json_text)) {
            DipResult d;
            d.llm = j.value("llm", "");
            d.verifier = j.value("verifier", "");
            d.condition = j.value("condition", "");
            d.n = j.at("n").get<std::size_t>();
            d.dip = j.at("dip").get<double>();
            d.p_value = j.at("p_value").get<double>();
            d.n_boot = j.at("n_boot").get<int>();
            d.seed = j.at("seed").get<std::uint64_t>();
            d.degenerate = j.value("degenerate", false);
            out.push_back(std::move(d));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed dip JSON: ") + e.what());
    }
    return out;
}

}  // namespace obfusc
