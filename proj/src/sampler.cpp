#include "epic/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "epic/error.hpp"

namespace epic {

std::size_t SampledPrompt::example_count() const noexcept {
    std::size_t total = 0;
    for (const auto& s : sets)
        for (const auto& g : s.groups) total += g.rows.size();
    return total;
}

std::vector<std::size_t> apportion(const std::vector<std::size_t>& class_counts, std::size_t total) {
    const std::size_t population = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
    std::vector<std::size_t> sizes(class_counts.size(), 0);
    if (population == 0 || class_counts.empty()) return sizes;

    // Integer arithmetic: quota_k = total * count_k / population, remainder kept exactly.
    std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder numerator, class)
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < class_counts.size(); ++k) {
        const std::size_t scaled = total * class_counts[k];
        sizes[k] = scaled / population;
        assigned += sizes[k];
        remainders.emplace_back(scaled % population, k);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++sizes[remainders[i].second];
    return sizes;
}

std::vector<std::string> plan_labels(const Table& train, const SamplePlan& plan) {
    if (plan.class_mode == ClassMode::SingleClass) {
        const auto& labels = train.schema.class_labels();
        if (std::find(labels.begin(), labels.end(), plan.single_label) == labels.end())
            throw Error(Errc::InsufficientClassRows, "class '" + plan.single_label + "' not present in training data");
        return {plan.single_label};
    }
    return train.schema.class_labels();
}

std::vector<std::size_t> group_sizes(const Table& train, const SamplePlan& plan) {
    auto labels = plan_labels(train, plan);
    if (plan.class_mode == ClassMode::SingleClass || plan.balance == Balance::Balanced)
        return std::vector<std::size_t>(labels.size(), plan.per_group);
    auto counts_by_label = train.class_counts();
    std::vector<std::size_t> counts;
    counts.reserve(labels.size());
    for (const auto& label : labels) counts.push_back(counts_by_label[label]);
    return apportion(counts, plan.per_group * labels.size());
}

SampledPrompt draw(const Table& train, const SamplePlan& plan) {
    if (plan.per_group < 1 || plan.sets < 1) throw Error(Errc::InvalidArgument, "per_group and sets must be >= 1");
    const auto labels = plan_labels(train, plan);
    const auto sizes = group_sizes(train, plan);

    std::mt19937_64 rng(plan.seed);
    // Each class pool is drawn without replacement for the whole prompt, so
    // no source row can repeat across sets or groups.
    std::vector<std::vector<std::size_t>> picks(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
        auto pool = train.class_rows(labels[k]);
        const std::size_t needed = sizes[k] * plan.sets;
        if (pool.size() < needed)
            throw Error(Errc::InsufficientClassRows, "class '" + labels[k] + "' needs " + std::to_string(needed) +
                                                         " rows, has " + std::to_string(pool.size()));
        for (std::size_t i = 0; i < needed; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        pool.resize(needed);
        picks[k] = std::move(pool);
    }

    SampledPrompt out;
    out.sets.resize(plan.sets);
    for (std::size_t s = 0; s < plan.sets; ++s) {
        auto& set = out.sets[s];
        for (std::size_t k = 0; k < labels.size(); ++k) {
            GroupDraw group{labels[k], {}, {}};
            for (std::size_t i = 0; i < sizes[k]; ++i) {
                const std::size_t src = picks[k][s * sizes[k] + i];
                group.source_rows.push_back(src);
                group.rows.push_back(train.rows[src]);
                set.listing.emplace_back(k, i);
            }
            set.groups.push_back(std::move(group));
        }
        std::shuffle(set.listing.begin(), set.listing.end(), rng);
    }
    return out;
}

}  // namespace epic
