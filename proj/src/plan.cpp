#include "sata/plan.hpp"

#include <cmath>
#include <numeric>

#include "sata/error.hpp"

namespace sata {

namespace {

struct Job {
    std::size_t head;
    Tile tile;
};

std::optional<Subhead> build_one(const Job& job, const PlanConfig& config, std::size_t index) {
    Subhead sub;
    sub.head = job.head;
    sub.q_fold = job.tile.q_fold;
    sub.k_fold = job.tile.k_fold;
    if (job.tile.mask.support() == 0) return std::nullopt;

    if (config.zero_skip) {
        SkipResult skip = zero_skip(job.tile.mask);
        for (std::size_t r : skip.kept_rows) sub.rows.push_back(job.tile.rows[r]);
        for (std::size_t c : skip.kept_cols) sub.cols.push_back(job.tile.cols[c]);
        for (std::size_t r : skip.skipped_rows) sub.skipped_rows.push_back(job.tile.rows[r]);
        for (std::size_t c : skip.skipped_cols) sub.skipped_cols.push_back(job.tile.cols[c]);
        sub.mask = std::move(skip.reduced);
    } else {
        sub.rows = job.tile.rows;
        sub.cols = job.tile.cols;
        sub.mask = job.tile.mask;
    }
    sub.outcome = resolve_head(sub.mask, resolve_params_for(sub.mask, config, index));
    return sub;
}

}  // namespace

void check_config(const PlanConfig& config, std::size_t seq_len) {
    auto in_range = [](double f) { return f > 0.0 && f <= 0.5; };
    if (!in_range(config.theta_fraction)) throw InvalidArgument("theta fraction must lie in (0, 0.5]");
    if (!in_range(config.s_h_init_fraction)) throw InvalidArgument("s_h init fraction must lie in (0, 0.5]");
    if (config.tile && *config.tile == 0) throw InvalidArgument("tile size must be positive");
    const std::size_t span = config.tile ? std::min(*config.tile, seq_len) : seq_len;
    const auto s_h_init = static_cast<std::size_t>(std::floor(config.s_h_init_fraction * static_cast<double>(span)));
    if (config.s_h_min > s_h_init) {
        throw InvalidArgument("s_h_min " + std::to_string(config.s_h_min) + " exceeds initial heavy size " +
                              std::to_string(s_h_init));
    }
}

ResolveParams resolve_params_for(const HeadMask& sub, const PlanConfig& config, std::size_t subhead_index) {
    ResolveParams p;
    const std::size_t n_keys = sub.cols();
    p.theta = config.theta_fraction * static_cast<double>(sub.rows());
    p.s_h_init = std::min(static_cast<std::size_t>(std::floor(config.s_h_init_fraction * static_cast<double>(n_keys))),
                          n_keys / 2);
    p.s_h_min = std::min(config.s_h_min, p.s_h_init);
    p.seed = config.seed;
    if (config.seed.kind == SeedPolicy::Kind::random) {
        p.seed.value = config.seed.value + 0x9e3779b97f4a7c15ULL * (subhead_index + 1);
    }
    return p;
}

std::vector<Subhead> build_subheads(const SelectiveMask& mask, const PlanConfig& config, Execution exec) {
    check_config(config, mask.seq_len);
    const TileSpec spec{config.tile.value_or(mask.seq_len), config.zero_skip};

    std::vector<Job> jobs;
    for (std::size_t h = 0; h < mask.heads.size(); ++h) {
        for (auto& t : tile_mask(mask.heads[h], spec)) jobs.push_back({h, std::move(t)});
    }

    std::vector<std::optional<Subhead>> built(jobs.size());
    const auto count = static_cast<std::ptrdiff_t>(jobs.size());
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            built[i] = build_one(jobs[i], config, static_cast<std::size_t>(i));
        }
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) built[i] = build_one(jobs[i], config, static_cast<std::size_t>(i));
    }

    std::vector<Subhead> out;
    out.reserve(built.size());
    for (auto& b : built) {
        if (b) out.push_back(std::move(*b));
    }
    return out;
}

Schedule plan_layer(const SelectiveMask& mask, const PlanConfig& config, Execution exec) {
    Schedule sched = schedule_layer(build_subheads(mask, config, exec));
    sched.seq_len = mask.seq_len;
    sched.n_heads = mask.n_heads;
    sched.tile = {config.tile.value_or(mask.seq_len), config.zero_skip};
    return sched;
}

}  // namespace sata
