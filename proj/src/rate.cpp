#include "hbdof/rate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace hbdof {

namespace {

double bits(double nats) { return nats / std::numbers::ln2; }

int worker_count(int trials) {
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HDL_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) workers = cap;
    }
    return std::clamp(workers, 1, std::max(trials, 1));
}

}  // namespace

std::vector<double> sum_rate_instant(const HybridDesign& design,
                                     std::span<const ChannelRealization> slots, double power) {
    if (power < 0.0) throw std::invalid_argument("sum_rate_instant: power must be nonnegative");
    if (static_cast<int>(slots.size()) != design.slots) {
        throw std::invalid_argument("sum_rate_instant: design extension length does not match slots");
    }
    const std::size_t k = design.users.size();
    std::vector<double> rates(k, 0.0);

    std::vector<ComplexMatrix> tx(k), rx(k);
    for (std::size_t i = 0; i < k; ++i) {
        tx[i] = design.users[i].tx_combined();
        rx[i] = design.users[i].rx_combined();
    }

    for (std::size_t i = 0; i < k; ++i) {
        const int di = design.users[i].streams;
        if (di == 0) continue;
        const ComplexMatrix noise_cov = rx[i].adjoint() * rx[i];
        try {
            logdet_hpd(noise_cov);
        } catch (const std::invalid_argument&) {
            throw InvalidDesignError("sum_rate_instant: combiner of user " + std::to_string(i + 1) +
                                     " is numerically singular");
        }

        ComplexMatrix interference = noise_cov;
        ComplexMatrix total = noise_cov;
        for (std::size_t j = 0; j < k; ++j) {
            const int dj = design.users[j].streams;
            if (dj == 0) continue;
            const ComplexMatrix he = rx[i].adjoint() * extend_block_diagonal(slots, static_cast<int>(j), static_cast<int>(i)) * tx[j];
            const ComplexMatrix gram = (power / dj) * (he * he.adjoint());
            total = total + gram;
            if (j != i) interference = interference + gram;
        }
        rates[i] = bits(logdet_hpd(total) - logdet_hpd(interference));
    }
    return rates;
}

RateTable mc_sweep(const NetworkConfig& cfg, const SweepScheme& scheme,
                   const std::vector<double>& snr_db, int trials, std::uint64_t seed) {
    cfg.validate();
    if (trials < 1) throw std::invalid_argument("mc_sweep: trials must be >= 1");
    if (snr_db.empty()) throw std::invalid_argument("mc_sweep: empty SNR grid");
    for (std::size_t p = 1; p < snr_db.size(); ++p) {
        if (!(snr_db[p] > snr_db[p - 1])) {
            throw std::invalid_argument("mc_sweep: snr_db must be strictly increasing");
        }
    }
    if (!scheme.make_design) throw std::invalid_argument("mc_sweep: scheme has no design factory");

    const std::size_t k = cfg.users.size();
    const std::size_t n_snr = snr_db.size();

    struct TrialResult {
        bool ok = false;
        std::vector<double> rates;  // n_snr * k, per slot
    };
    std::vector<TrialResult> results(static_cast<std::size_t>(trials));
    std::exception_ptr hard_error;
    std::mutex error_mutex;

    auto run_trial = [&](int trial) {
        TrialResult& out = results[static_cast<std::size_t>(trial)];
        Rng rng(mix64(seed, static_cast<std::uint64_t>(trial)));
        const std::vector<ChannelRealization> rs = draw_channels(cfg, scheme.slots, rng);
        HybridDesign design;
        try {
            design = scheme.make_design(cfg, rs, rng);
        } catch (const std::runtime_error&) {
            return;  // failed trial; invalid_argument and friends still propagate
        }
        out.rates.assign(n_snr * k, 0.0);
        for (std::size_t p = 0; p < n_snr; ++p) {
            const double power = std::pow(10.0, snr_db[p] / 10.0);
            const std::vector<double> r = sum_rate_instant(design, rs, power);
            for (std::size_t u = 0; u < k; ++u) {
                out.rates[p * k + u] = r[u] / scheme.slots;
            }
        }
        out.ok = true;
    };

    const int workers = worker_count(trials);
    if (workers == 1) {
        for (int trial = 0; trial < trials; ++trial) run_trial(trial);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int trial = w; trial < trials; trial += workers) {
                    try {
                        run_trial(trial);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!hard_error) hard_error = std::current_exception();
                    }
                }
            });
        }
        for (std::thread& th : pool) th.join();
        if (hard_error) std::rethrow_exception(hard_error);
    }

    RateTable table;
    table.scenario = scheme.name;
    table.trials_requested = trials;
    int ok_count = 0;
    std::vector<double> sums(n_snr * k, 0.0);
    for (const TrialResult& tr : results) {  // fixed reduction order
        if (!tr.ok) continue;
        ++ok_count;
        for (std::size_t idx = 0; idx < sums.size(); ++idx) sums[idx] += tr.rates[idx];
    }
    table.failures = trials - ok_count;

    for (std::size_t p = 0; p < n_snr; ++p) {
        RatePoint point;
        point.snr_db = snr_db[p];
        point.seed = seed;
        point.trials = ok_count;
        point.per_user_bits.resize(k, 0.0);
        if (ok_count > 0) {
            for (std::size_t u = 0; u < k; ++u) {
                point.per_user_bits[u] = sums[p * k + u] / ok_count;
                point.sum_bits += point.per_user_bits[u];
            }
        }
        table.points.push_back(std::move(point));
    }

    if (table.failure_fraction() > 0.2) {
        throw SweepDegradedError("mc_sweep: " + std::to_string(table.failures) + " of " +
                                     std::to_string(trials) + " trials failed",
                                 std::move(table));
    }
    return table;
}

double estimate_dof(const RateTable& table, double lo_db, double hi_db) {
    std::vector<double> x, y;
    for (const RatePoint& p : table.points) {
        if (p.snr_db >= lo_db && p.snr_db <= hi_db) {
            x.push_back(p.snr_db / 10.0 * std::numbers::ln10 / std::numbers::ln2);  // log2(P)
            y.push_back(p.sum_bits);
        }
    }
    if (x.size() < 2) {
        throw std::invalid_argument("estimate_dof: need at least two points in the window");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - mx) * (y[i] - my);
        var += (x[i] - mx) * (x[i] - mx);
    }
    return cov / var;
}

}  // namespace hbdof
