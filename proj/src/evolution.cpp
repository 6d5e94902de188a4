#include "samgp/evolution.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/core.h>

#include "samgp/error.hpp"
#include "samgp/inference.hpp"
#include "samgp/random.hpp"
#include "samgp/ridge.hpp"
#include "samgp/selection.hpp"

namespace samgp {

namespace {

constexpr std::uint64_t kLoopTag = 0xe701;
constexpr std::uint64_t kNoiseTag = 0x5a4;
constexpr std::uint64_t kZetaTag = 0x3c;

Evaluation failed_evaluation(Eigen::Index n)
{
    Evaluation e;
    e.objectives = { kWorstObjective, kWorstObjective };
    e.case_errors = Eigen::VectorXd::Constant(n, kWorstObjective);
    e.failed = true;
    return e;
}

void evaluate_all(std::vector<Individual*>& todo, const EvaluationContext& ctx)
{
    const auto count = todo.size();
    const auto workers = static_cast<std::size_t>(std::max(1, ctx.cfg.threads));
    if (workers == 1 || count < 2) {
        for (auto* ind : todo) {
            ind->set_evaluation(evaluate_individual(*ind, ctx));
        }
        return;
    }
    // Results do not depend on the interleaving: evaluation is pure and the cache only
    // ever stores seed-determined values.
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                todo[i]->set_evaluation(evaluate_individual(*todo[i], ctx));
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

void evaluate_missing(std::vector<Individual>& pop, const EvaluationContext& ctx)
{
    std::vector<Individual*> todo;
    for (auto& ind : pop) {
        if (!ind.evaluated()) {
            todo.push_back(&ind);
        }
    }
    evaluate_all(todo, ctx);
}

std::vector<ObjectiveVector> objectives_of(const std::vector<Individual>& pop)
{
    std::vector<ObjectiveVector> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) {
        out.push_back(ind.objectives());
    }
    return out;
}

} // namespace

void EvolutionConfig::validate() const
{
    std::vector<std::string> problems;
    auto rate = [&](const char* name, double v) {
        if (!(v >= 0.0 && v <= 1.0)) {
            problems.push_back(fmt::format("{} must lie in [0, 1] (got {})", name, v));
        }
    };
    if (population < 2) {
        problems.push_back(fmt::format("population must be >= 2 (got {})", population));
    }
    if (generations < 1) {
        problems.push_back(fmt::format("generations must be >= 1 (got {})", generations));
    }
    rate("crossover rate", crossover_rate);
    rate("mutation rate", mutation_rate);
    rate("tree addition rate", tree_add_rate);
    rate("tree deletion rate", tree_delete_rate);
    if (init_depth.min < 0 || init_depth.max < init_depth.min || init_depth.max > kMaxTreeDepth) {
        problems.push_back(fmt::format("initial depth range [{}, {}] is invalid", init_depth.min, init_depth.max));
    }
    if (initial_trees < 1 || initial_trees > static_cast<int>(kMaxTrees)) {
        problems.push_back(fmt::format("initial trees must lie in [1, {}] (got {})", kMaxTrees, initial_trees));
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        problems.push_back(fmt::format("alpha must be > 0 (got {})", alpha));
    }
    if (archive_size < 1) {
        problems.push_back("archive size must be >= 1");
    }
    if (threads < 1) {
        problems.push_back(fmt::format("threads must be >= 1 (got {})", threads));
    }
    try {
        perturbation.validate();
    } catch (const ConfigError& e) {
        problems.emplace_back(e.what());
    }
    if (!problems.empty()) {
        std::string msg = "invalid evolution config:";
        for (const auto& p : problems) {
            msg += "\n  - " + p;
        }
        throw ConfigError(msg);
    }
}

Evaluation evaluate_individual(const Individual& ind, const EvaluationContext& ctx)
{
    const auto n = ctx.X.rows();
    try {
        Eigen::MatrixXd phi = evaluate_trees(std::span<const FeatureTree>(ind.trees()), ctx.X);
        auto model = fit_ridge(phi, ctx.y, ctx.cfg.alpha);
        Evaluation e;
        e.case_errors = model.loocv_errors;
        e.objectives.o1 = model.mean_loocv_error();
        e.tikhonov = tikhonov(model);
        switch (ctx.cfg.measure) {
        case MeasureKind::Sam:
            e.objectives.o2 = estimate_sharpness(ind, model, ctx.X, ctx.y, ctx.cfg.perturbation, ctx.cache).aggregate;
            break;
        case MeasureKind::Pp:
            e.objectives.o2 = parsimony(ind);
            break;
        case MeasureKind::Tk:
            e.objectives.o2 = e.tikhonov;
            break;
        case MeasureKind::Wcrv:
            e.objectives.o2 = wcrv(ctx.cfg.wcrv_raw_inputs ? ctx.X : phi, ctx.y, model.fitted);
            break;
        case MeasureKind::Iodc:
            if (ctx.input_distances == nullptr) {
                throw ContractError("iodc needs precomputed input distances");
            }
            e.objectives.o2 = iodc(*ctx.input_distances, model.fitted);
            break;
        case MeasureKind::Gc:
        case MeasureKind::Rc:
        case MeasureKind::None:
            e.objectives.o2 = 0.0;
            break;
        }
        if (!std::isfinite(e.objectives.o1) || !std::isfinite(e.objectives.o2) || !e.case_errors.allFinite()) {
            return failed_evaluation(n);
        }
        e.model = std::move(model);
        return e;
    } catch (const EvaluationError&) {
        return failed_evaluation(n);
    }
}

void apply_pool_measure(std::vector<Individual>& pool, const EvaluationContext& ctx, int generation)
{
    if (ctx.cfg.measure == MeasureKind::Gc) {
        std::vector<double> pp;
        std::vector<double> tk;
        for (const auto& ind : pool) {
            bool ok = !ind.evaluation()->failed;
            pp.push_back(ok ? parsimony(ind) : kWorstObjective);
            tk.push_back(ok ? ind.evaluation()->tikhonov : kWorstObjective);
        }
        auto ranks = grand_complexity(pp, tk);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            auto& ev = *pool[i].evaluation();
            if (!ev.failed) {
                ev.objectives.o2 = ranks[i];
            }
        }
    } else if (ctx.cfg.measure == MeasureKind::Rc) {
        Rng zrng(derive_seed(ctx.cfg.seed, { kZetaTag, static_cast<std::uint64_t>(generation) }));
        const Eigen::VectorXd zeta = rademacher_signs(ctx.X.rows(), zrng);
        for (auto& ind : pool) {
            auto& ev = *ind.evaluation();
            if (ev.failed) {
                continue;
            }
            try {
                Eigen::MatrixXd phi = evaluate_trees(std::span<const FeatureTree>(ind.trees()), ctx.X);
                double v = rademacher(phi, ctx.y, zeta, ctx.cfg.alpha);
                if (std::isfinite(v)) {
                    ev.objectives.o2 = v;
                    continue;
                }
            } catch (const EvaluationError&) {
            }
            ev = failed_evaluation(ctx.X.rows());
        }
    }
}

std::vector<Individual> select_final_members(const std::vector<Individual>& population, const Archive& archive,
    const EvolutionConfig& cfg)
{
    if (cfg.measure == MeasureKind::Sam || cfg.archive_size > 1) {
        std::vector<Individual> out;
        for (const auto& m : archive.members()) {
            out.push_back(m.individual);
        }
        if (!out.empty()) {
            return out;
        }
    }
    auto objs = objectives_of(population);
    auto fronts = nondominated_sort(objs);
    std::vector<ObjectiveVector> front;
    for (auto i : fronts.front()) {
        front.push_back(objs[i]);
    }
    auto pick = fronts.front()[mmd_knee(front)];
    if (population[pick].evaluation()->failed) {
        throw EvaluationError("every individual failed evaluation; no model to return");
    }
    return { population[pick] };
}

EvolutionResult evolve(const EvolutionConfig& cfg_in, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
    const std::optional<TestData>& test)
{
    cfg_in.validate();
    if (X.rows() != y.size() || X.rows() < 2 || X.cols() < 1) {
        throw ContractError(fmt::format("training data must have >= 2 rows and >= 1 column (got {}x{}, {} targets)", X.rows(),
            X.cols(), y.size()));
    }
    EvolutionConfig cfg = cfg_in;
    cfg.perturbation.seed = derive_seed(cfg.seed, { kNoiseTag });

    const auto N = static_cast<std::size_t>(cfg.population);
    const auto var_count = static_cast<std::uint32_t>(X.cols());
    Rng rng(derive_seed(cfg.seed, { kLoopTag }));
    SemanticsCache cache(cfg.cache_capacity, cfg.cache && cfg.measure == MeasureKind::Sam);

    Eigen::VectorXd distances;
    if (cfg.measure == MeasureKind::Iodc) {
        distances = pairwise_distances(X);
    }
    EvaluationContext ctx { X, y, cfg, &cache, cfg.measure == MeasureKind::Iodc ? &distances : nullptr };

    const auto bounds = PredictionBounds::from_targets(y);
    auto score_members = [&](const std::vector<Individual>& members, const Eigen::MatrixXd& Xs, const Eigen::VectorXd& ys,
                             bool reduce) {
        std::vector<ModelMember> mm;
        mm.reserve(members.size());
        for (const auto& ind : members) {
            mm.push_back(make_member(ind, X));
        }
        return r2(ys, ensemble_predict(mm, Xs, bounds, reduce));
    };

    RampedHalfAndHalf init(var_count, cfg.init_depth);
    std::vector<Individual> pop;
    pop.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<FeatureTree> trees;
        for (int t = 0; t < cfg.initial_trees; ++t) {
            trees.push_back(init(rng));
        }
        pop.emplace_back(std::move(trees));
    }
    evaluate_missing(pop, ctx);
    apply_pool_measure(pop, ctx, 0);

    EvolutionResult result;
    result.archive = Archive(cfg.archive_size);
    result.archive.offer_all(pop);

    const auto cases = y.size();
    Eigen::MatrixXd errors(static_cast<Eigen::Index>(N), cases);
    for (int gen = 1; gen <= cfg.generations; ++gen) {
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < N; ++i) {
            errors.row(static_cast<Eigen::Index>(i)) = pop[i].evaluation()->case_errors.transpose();
        }

        std::vector<Individual> offspring;
        offspring.reserve(N + 1);
        while (offspring.size() < N) {
            const auto& a = pop[lexicase_select(errors, rng)];
            const auto& b = pop[lexicase_select(errors, rng)];
            std::pair<Individual, Individual> kids = coin(rng, cfg.crossover_rate) ? crossover(a, b, rng) : std::pair { a, b };
            for (auto* kid : { &kids.first, &kids.second }) {
                Individual c = maybe_mutate(*kid, cfg.mutation_rate, rng, var_count);
                if (coin(rng, cfg.tree_add_rate)) {
                    c = add_tree(c, rng, var_count);
                }
                if (coin(rng, cfg.tree_delete_rate)) {
                    c = delete_tree(c, rng);
                }
                offspring.push_back(std::move(c));
            }
        }
        offspring.resize(N);
        evaluate_missing(offspring, ctx);

        std::vector<Individual> pool = std::move(pop);
        pool.insert(pool.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
        apply_pool_measure(pool, ctx, gen);

        auto objs = objectives_of(pool);
        auto keep = cfg.measure == MeasureKind::None ? elitist_survival(objs, N, N) : nsga2_survival(objs, N, rng);
        result.archive.offer_all(std::span<const Individual>(pool).subspan(N));
        if (cfg.measure == MeasureKind::Gc || cfg.measure == MeasureKind::Rc) {
            // o2 of the parents was re-scored for this pool too
            result.archive.offer_all(std::span<const Individual>(pool).first(N));
        }
        pop.clear();
        for (auto i : keep) {
            pop.push_back(pool[i]);
        }

        GenerationRecord rec;
        rec.generation = gen;
        rec.best_o1 = std::numeric_limits<double>::infinity();
        rec.best_o2 = std::numeric_limits<double>::infinity();
        for (const auto& ind : pop) {
            rec.best_o1 = std::min(rec.best_o1, ind.objectives().o1);
            rec.best_o2 = std::min(rec.best_o2, ind.objectives().o2);
        }
        rec.archive_score = result.archive.empty() ? kWorstObjective * 2 : result.archive.best().score;
        auto members = select_final_members(pop, result.archive, cfg);
        rec.train_r2 = score_members(members, X, y, false);
        rec.test_r2 = test ? score_members(members, test->X, test->y, cfg.reduction) : std::numeric_limits<double>::quiet_NaN();
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.records.push_back(rec);
    }

    auto objs = objectives_of(pop);
    const auto fronts = nondominated_sort(objs);
    for (auto i : fronts.front()) {
        result.front.push_back(pop[i]);
    }
    result.final_members = select_final_members(pop, result.archive, cfg);
    result.population = std::move(pop);
    result.cache_hits = cache.hits();
    result.cache_misses = cache.misses();
    return result;
}

} // namespace samgp
