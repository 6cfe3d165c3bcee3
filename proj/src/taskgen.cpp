#include "paddle/taskgen.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>

#include "paddle/error.hpp"
#include "paddle/random.hpp"

namespace paddle {

void TaskSpec::validate() const
{
    if (k_total < 1) {
        throw ConfigError("k_total must be at least 1");
    }
    if (k_effective < 1 || k_effective > k_total) {
        throw ConfigError("k_effective must lie in [1, k_total], got "
                          + std::to_string(k_effective));
    }
    if (shots < 1) {
        throw ConfigError("shots must be at least 1");
    }
    if (query_size < 1) {
        throw ConfigError("query_size must be at least 1");
    }
    if (query_size < k_effective) {
        throw ConfigError("query_size " + std::to_string(query_size)
                          + " cannot cover k_effective = " + std::to_string(k_effective)
                          + " classes");
    }
}

void check_feasible(const FeatureBank& bank, const TaskSpec& spec)
{
    spec.validate();
    if (bank.classes.size() < static_cast<std::size_t>(spec.k_total)) {
        throw ConfigError("bank has " + std::to_string(bank.classes.size())
                          + " classes, task needs k_total = " + std::to_string(spec.k_total));
    }
    // any k_effective classes may be chosen, so the smallest ones must suffice
    std::vector<std::size_t> leftovers;
    for (const auto& c : bank.classes) {
        const auto rows = static_cast<std::size_t>(c.vectors.rows());
        if (rows < static_cast<std::size_t>(spec.shots) + 1) {
            throw ConfigError("class " + std::to_string(c.class_id) + " has " + std::to_string(rows)
                              + " vectors, needs at least shots + 1 = "
                              + std::to_string(spec.shots + 1));
        }
        leftovers.push_back(rows - static_cast<std::size_t>(spec.shots));
    }
    std::sort(leftovers.begin(), leftovers.end());
    const auto worst = std::accumulate(
        leftovers.begin(), leftovers.begin() + spec.k_effective, std::size_t{0});
    if (worst < static_cast<std::size_t>(spec.query_size)) {
        throw ConfigError("the " + std::to_string(spec.k_effective)
                          + " smallest classes hold only " + std::to_string(worst)
                          + " non-support vectors, query_size is "
                          + std::to_string(spec.query_size));
    }
}

namespace {

struct SupportDraw {
    std::vector<std::size_t> classes; // bank indices, task label = position
    std::vector<std::vector<std::size_t>> rows; // support rows per task label
};

SupportDraw draw_support(const FeatureBank& bank, const TaskSpec& spec, Rng& rng)
{
    SupportDraw draw;
    if (bank.classes.size() == static_cast<std::size_t>(spec.k_total)) {
        draw.classes.resize(bank.classes.size());
        std::iota(draw.classes.begin(), draw.classes.end(), std::size_t{0});
    } else {
        draw.classes = rng.sample_without_replacement(bank.classes.size(),
                                                      static_cast<std::size_t>(spec.k_total));
        std::sort(draw.classes.begin(), draw.classes.end());
    }
    for (const auto c : draw.classes) {
        const auto rows = static_cast<std::size_t>(bank.classes[c].vectors.rows());
        draw.rows.push_back(
            rng.sample_without_replacement(rows, static_cast<std::size_t>(spec.shots)));
    }
    return draw;
}

} // namespace

TaskInstance generate_task(const FeatureBank& bank, const TaskSpec& spec)
{
    check_feasible(bank, spec);
    Rng rng(spec.seed);

    SupportDraw support;
    if (spec.fixed_support_seed) {
        Rng support_rng(*spec.fixed_support_seed);
        support = draw_support(bank, spec, support_rng);
    } else {
        support = draw_support(bank, spec, rng);
    }

    auto effective = rng.sample_without_replacement(static_cast<std::size_t>(spec.k_total),
                                                    static_cast<std::size_t>(spec.k_effective));
    std::sort(effective.begin(), effective.end());

    // pool of (task label, bank row) not used by the support set
    std::vector<std::pair<int, std::size_t>> pool;
    for (const auto label : effective) {
        const auto& record = bank.classes[support.classes[label]];
        std::vector<bool> used(static_cast<std::size_t>(record.vectors.rows()), false);
        for (const auto r : support.rows[label]) {
            used[r] = true;
        }
        for (std::size_t r = 0; r < used.size(); ++r) {
            if (!used[r]) {
                pool.emplace_back(static_cast<int>(label), r);
            }
        }
    }

    std::vector<std::size_t> picks;
    for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxQueryRedraws) {
            throw ConfigError("could not draw a query set covering all "
                              + std::to_string(spec.k_effective) + " effective classes after "
                              + std::to_string(kMaxQueryRedraws) + " attempts");
        }
        picks = rng.sample_without_replacement(pool.size(),
                                               static_cast<std::size_t>(spec.query_size));
        std::unordered_set<int> seen;
        for (const auto p : picks) {
            seen.insert(pool[p].first);
        }
        if (seen.size() == static_cast<std::size_t>(spec.k_effective)) {
            break;
        }
    }

    const auto dim = static_cast<Eigen::Index>(bank.dim);
    const auto n_support = static_cast<Eigen::Index>(spec.k_total * spec.shots);
    TaskInstance task;
    task.n_query = static_cast<std::size_t>(spec.query_size);
    task.k_total = spec.k_total;
    task.k_effective = spec.k_effective;
    task.features.resize(static_cast<Eigen::Index>(spec.query_size) + n_support, dim);
    Eigen::Index row = 0;
    for (const auto p : picks) {
        const auto [label, r] = pool[p];
        task.features.row(row++)
            = bank.classes[support.classes[static_cast<std::size_t>(label)]]
                  .vectors.row(static_cast<Eigen::Index>(r))
                  .cast<double>();
        task.query_truth.push_back(label);
    }
    for (std::size_t label = 0; label < support.classes.size(); ++label) {
        const auto& record = bank.classes[support.classes[label]];
        task.class_ids.push_back(record.class_id);
        for (const auto r : support.rows[label]) {
            task.features.row(row++) = record.vectors.row(static_cast<Eigen::Index>(r)).cast<double>();
            task.support_labels.push_back(static_cast<int>(label));
        }
    }
    return task;
}

Matrix synth_gaussian_centers(int k, int dim, double separation, std::uint64_t seed)
{
    if (k < 1 || dim < 1 || !(separation >= 0.0)) {
        throw ConfigError("synthetic bank needs k >= 1, dim >= 1 and separation >= 0");
    }
    Rng rng(derive_seed(seed, 0));
    Matrix centers(k, dim);
    for (int c = 0; c < k; ++c) {
        double norm = 0.0;
        do {
            for (int j = 0; j < dim; ++j) {
                centers(c, j) = rng.normal();
            }
            norm = centers.row(c).norm();
        } while (norm == 0.0);
        centers.row(c) *= separation / norm;
    }
    return centers;
}

FeatureBank synth_gaussian_bank(int k, int dim, int per_class, double separation,
                                std::uint64_t seed)
{
    if (per_class < 1) {
        throw ConfigError("synthetic bank needs per_class >= 1");
    }
    const Matrix centers = synth_gaussian_centers(k, dim, separation, seed);
    FeatureBank bank;
    bank.dim = static_cast<std::size_t>(dim);
    for (int c = 0; c < k; ++c) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c) + 1));
        ClassRecord record;
        record.class_id = static_cast<std::uint32_t>(c);
        record.vectors.resize(per_class, dim);
        for (int i = 0; i < per_class; ++i) {
            for (int j = 0; j < dim; ++j) {
                record.vectors(i, j) = static_cast<float>(centers(c, j) + rng.normal());
            }
        }
        bank.classes.push_back(std::move(record));
    }
    return bank;
}

} // namespace paddle
