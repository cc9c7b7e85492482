#include "agrisim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace agrisim {

int chebyshev(const Cell& a, const Cell& b) {
    return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
}

PlanningInstance make_planning_instance(const FarmEnv& env, double density_threshold) {
    PlanningInstance inst;
    const WeedMap& w = env.weed_map();
    for (int r = 0; r < w.n; ++r)
        for (int c = 0; c < w.n; ++c)
            if (w.density_at(r, c) > density_threshold) inst.targets.push_back({r, c});
    for (const SensorNode& s : env.sensors()) {
        Cell cell{s.row, s.col};
        if (std::find(inst.targets.begin(), inst.targets.end(), cell) ==
            inst.targets.end())
            inst.targets.push_back(cell);
    }
    for (const UavState& u : env.uavs()) inst.starts.push_back({u.row, u.col});
    inst.step_budget = env.config().max_steps;
    inst.energy_budget = env.config().physics.battery_capacity;
    inst.grid_count = env.config().geometry.grid_count;
    return inst;
}

double tour_cost(const Cell& start, const std::vector<Cell>& order) {
    double cost = 0.0;
    Cell cur = start;
    for (const Cell& t : order) {
        cost += chebyshev(cur, t);
        cur = t;
    }
    return cost;
}

std::vector<std::vector<int>> assign_targets(const PlanningInstance& inst, Rng& rng) {
    (void)rng;  // the clustering below is deterministic given the instance
    const int k = static_cast<int>(inst.starts.size());
    const int m = static_cast<int>(inst.targets.size());
    std::vector<std::vector<int>> clusters(k);
    if (m == 0) return clusters;

    // Centroids seeded at the UAV starts, refined by Lloyd iterations.
    std::vector<std::array<double, 2>> cent(k);
    for (int j = 0; j < k; ++j)
        cent[j] = {static_cast<double>(inst.starts[j][0]),
                   static_cast<double>(inst.starts[j][1])};

    std::vector<int> owner(m, 0);
    for (int iter = 0; iter < 16; ++iter) {
        bool changed = false;
        for (int i = 0; i < m; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                const double dr = inst.targets[i][0] - cent[j][0];
                const double dc = inst.targets[i][1] - cent[j][1];
                const double d = dr * dr + dc * dc;
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            if (owner[i] != best) {
                owner[i] = best;
                changed = true;
            }
        }
        for (int j = 0; j < k; ++j) {
            double sr = 0, sc = 0;
            int cnt = 0;
            for (int i = 0; i < m; ++i)
                if (owner[i] == j) {
                    sr += inst.targets[i][0];
                    sc += inst.targets[i][1];
                    ++cnt;
                }
            if (cnt > 0) cent[j] = {sr / cnt, sc / cnt};
        }
        if (!changed) break;
    }

    // Balance pass: no cluster may exceed ceil(m/k) + 1; overflow moves
    // the member farthest from its centroid to the nearest open cluster.
    const int cap = (m + k - 1) / k + 1;
    for (int i = 0; i < m; ++i) clusters[owner[i]].push_back(i);
    for (int j = 0; j < k; ++j) {
        while (static_cast<int>(clusters[j].size()) > cap) {
            int worst_pos = 0;
            double worst_d = -1;
            for (int p = 0; p < static_cast<int>(clusters[j].size()); ++p) {
                const int i = clusters[j][p];
                const double dr = inst.targets[i][0] - cent[j][0];
                const double dc = inst.targets[i][1] - cent[j][1];
                const double d = dr * dr + dc * dc;
                if (d > worst_d) {
                    worst_d = d;
                    worst_pos = p;
                }
            }
            const int i = clusters[j][worst_pos];
            clusters[j].erase(clusters[j].begin() + worst_pos);
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (int q = 0; q < k; ++q) {
                if (q == j || static_cast<int>(clusters[q].size()) >= cap) continue;
                const double dr = inst.targets[i][0] - cent[q][0];
                const double dc = inst.targets[i][1] - cent[q][1];
                const double d = dr * dr + dc * dc;
                if (d < best_d) {
                    best_d = d;
                    best = q;
                }
            }
            clusters[best >= 0 ? best : (j + 1) % k].push_back(i);
        }
    }
    return clusters;
}

namespace {

Action action_from_offset(int dr, int dc) {
    static constexpr std::array<std::array<int, 2>, 8> kOffsets{{
        {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1},
    }};
    for (int a = 0; a < 8; ++a)
        if (kOffsets[a][0] == dr && kOffsets[a][1] == dc)
            return static_cast<Action>(a);
    throw std::logic_error("action_from_offset: not a king move");
}

// Greedy king-move expansion of consecutive waypoints, truncated to the
// step budget.
std::vector<Action> expand_actions(const Cell& start, const std::vector<Cell>& order,
                                   int budget) {
    std::vector<Action> seq;
    Cell cur = start;
    for (const Cell& t : order) {
        while (cur != t) {
            const int dr = (t[0] > cur[0]) - (t[0] < cur[0]);
            const int dc = (t[1] > cur[1]) - (t[1] < cur[1]);
            if (static_cast<int>(seq.size()) >= budget) return seq;
            seq.push_back(action_from_offset(dr, dc));
            cur = {cur[0] + dr, cur[1] + dc};
        }
    }
    return seq;
}

using OrderSolver = std::vector<int> (*)(const Cell&, const std::vector<Cell>&,
                                         const void*, Rng&, std::vector<double>&);

RoutePlan build_plan(const PlanningInstance& inst, Rng& rng, const void* params,
                     OrderSolver solve) {
    const auto clusters = assign_targets(inst, rng);
    const int k = static_cast<int>(inst.starts.size());
    RoutePlan plan;
    plan.visit_order.resize(k);
    plan.action_sequences.resize(k);
    plan.cost_history.resize(k);
    for (int j = 0; j < k; ++j) {
        std::vector<Cell> subset;
        for (int i : clusters[j]) subset.push_back(inst.targets[i]);
        if (!subset.empty()) {
            const auto order = solve(inst.starts[j], subset, params, rng,
                                     plan.cost_history[j]);
            for (int idx : order) plan.visit_order[j].push_back(subset[idx]);
        }
        plan.action_sequences[j] =
            expand_actions(inst.starts[j], plan.visit_order[j], inst.step_budget);
    }
    return plan;
}

double order_cost(const Cell& start, const std::vector<Cell>& targets,
                  const std::vector<int>& order) {
    double cost = 0.0;
    Cell cur = start;
    for (int idx : order) {
        cost += chebyshev(cur, targets[idx]);
        cur = targets[idx];
    }
    return cost;
}

std::vector<int> solve_aco(const Cell& start, const std::vector<Cell>& targets,
                           const void* vp, Rng& rng, std::vector<double>& history) {
    const AcoParams& p = *static_cast<const AcoParams*>(vp);
    const int m = static_cast<int>(targets.size());
    if (m == 1) {
        history.push_back(chebyshev(start, targets[0]));
        return {0};
    }
    // Node m is the virtual start.
    const int nodes = m + 1;
    auto dist = [&](int a, int b) {
        const Cell& ca = a == m ? start : targets[a];
        const Cell& cb = b == m ? start : targets[b];
        return std::max(0.5, static_cast<double>(chebyshev(ca, cb)));
    };
    std::vector<double> pher(static_cast<size_t>(nodes) * nodes, 1.0);
    std::vector<int> best_order(m);
    std::iota(best_order.begin(), best_order.end(), 0);
    double best_cost = order_cost(start, targets, best_order);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int it = 0; it < p.iterations; ++it) {
        std::vector<std::pair<double, std::vector<int>>> ants;
        for (int a = 0; a < p.ants; ++a) {
            std::vector<int> order;
            std::vector<char> used(m, 0);
            int cur = m;
            for (int s = 0; s < m; ++s) {
                double total = 0.0;
                std::vector<double> w(m, 0.0);
                for (int j = 0; j < m; ++j) {
                    if (used[j]) continue;
                    w[j] = std::pow(pher[cur * nodes + j], p.alpha) *
                           std::pow(1.0 / dist(cur, j), p.beta);
                    total += w[j];
                }
                double pick = unit(rng) * total;
                int chosen = -1;
                for (int j = 0; j < m; ++j) {
                    if (used[j]) continue;
                    pick -= w[j];
                    if (pick <= 0) {
                        chosen = j;
                        break;
                    }
                }
                if (chosen < 0)
                    for (int j = m - 1; j >= 0; --j)
                        if (!used[j]) {
                            chosen = j;
                            break;
                        }
                order.push_back(chosen);
                used[chosen] = 1;
                cur = chosen;
            }
            ants.emplace_back(order_cost(start, targets, order), std::move(order));
        }
        for (auto& x : pher) x *= (1.0 - p.evaporation);
        for (const auto& [cost, order] : ants) {
            const double deposit = 1.0 / std::max(cost, 0.5);
            int cur = m;
            for (int j : order) {
                pher[cur * nodes + j] += deposit;
                pher[j * nodes + cur] += deposit;
                cur = j;
            }
            if (cost < best_cost) {
                best_cost = cost;
                best_order = order;
            }
        }
        history.push_back(best_cost);
    }
    return best_order;
}

std::vector<int> keys_to_order(const std::vector<double>& keys) {
    std::vector<int> order(keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return keys[a] < keys[b]; });
    return order;
}

std::vector<int> solve_pso(const Cell& start, const std::vector<Cell>& targets,
                           const void* vp, Rng& rng, std::vector<double>& history) {
    const PsoParams& p = *static_cast<const PsoParams*>(vp);
    const int m = static_cast<int>(targets.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    struct Particle {
        std::vector<double> pos, vel, best_pos;
        double best_cost;
    };
    std::vector<Particle> swarm(p.particles);
    std::vector<double> gbest_pos;
    double gbest_cost = std::numeric_limits<double>::infinity();
    for (auto& pt : swarm) {
        pt.pos.resize(m);
        pt.vel.resize(m);
        for (int i = 0; i < m; ++i) {
            pt.pos[i] = unit(rng);
            pt.vel[i] = 0.2 * (unit(rng) - 0.5);
        }
        pt.best_pos = pt.pos;
        pt.best_cost = order_cost(start, targets, keys_to_order(pt.pos));
        if (pt.best_cost < gbest_cost) {
            gbest_cost = pt.best_cost;
            gbest_pos = pt.pos;
        }
    }

    for (int it = 0; it < p.iterations; ++it) {
        for (auto& pt : swarm) {
            for (int i = 0; i < m; ++i) {
                pt.vel[i] = p.inertia * pt.vel[i] +
                            p.cognitive * unit(rng) * (pt.best_pos[i] - pt.pos[i]) +
                            p.social * unit(rng) * (gbest_pos[i] - pt.pos[i]);
                pt.pos[i] += pt.vel[i];
            }
            const double cost = order_cost(start, targets, keys_to_order(pt.pos));
            if (cost < pt.best_cost) {
                pt.best_cost = cost;
                pt.best_pos = pt.pos;
            }
            if (cost < gbest_cost) {
                gbest_cost = cost;
                gbest_pos = pt.pos;
            }
        }
        history.push_back(gbest_cost);
    }
    return keys_to_order(gbest_pos);
}

std::vector<int> solve_ga(const Cell& start, const std::vector<Cell>& targets,
                          const void* vp, Rng& rng, std::vector<double>& history) {
    const GaParams& p = *static_cast<const GaParams*>(vp);
    const int m = static_cast<int>(targets.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick_gene(0, std::max(0, m - 1));

    auto random_perm = [&] {
        std::vector<int> x(m);
        std::iota(x.begin(), x.end(), 0);
        for (int i = m - 1; i > 0; --i) {
            std::uniform_int_distribution<int> d(0, i);
            std::swap(x[i], x[d(rng)]);
        }
        return x;
    };

    struct Indiv {
        std::vector<int> genes;
        double cost;
    };
    std::vector<Indiv> pop(p.population);
    for (auto& ind : pop) {
        ind.genes = random_perm();
        ind.cost = order_cost(start, targets, ind.genes);
    }
    auto best_it = std::min_element(pop.begin(), pop.end(),
                                    [](auto& a, auto& b) { return a.cost < b.cost; });
    Indiv best = *best_it;

    auto tournament = [&]() -> const Indiv& {
        std::uniform_int_distribution<int> d(0, p.population - 1);
        const Indiv* winner = &pop[d(rng)];
        for (int i = 0; i < 2; ++i) {
            const Indiv& c = pop[d(rng)];
            if (c.cost < winner->cost) winner = &c;
        }
        return *winner;
    };

    // Order crossover (OX).
    auto crossover = [&](const std::vector<int>& a, const std::vector<int>& b) {
        if (m < 2) return a;
        int lo = pick_gene(rng), hi = pick_gene(rng);
        if (lo > hi) std::swap(lo, hi);
        std::vector<int> child(m, -1);
        std::vector<char> used(m, 0);
        for (int i = lo; i <= hi; ++i) {
            child[i] = a[i];
            used[a[i]] = 1;
        }
        int pos = (hi + 1) % m;
        for (int i = 0; i < m; ++i) {
            const int gene = b[(hi + 1 + i) % m];
            if (used[gene]) continue;
            child[pos] = gene;
            pos = (pos + 1) % m;
        }
        return child;
    };

    // One first-improvement 2-opt pass (segment reversal) on the elite;
    // counters the premature convergence swap mutation alone suffers from.
    auto polish = [&](Indiv& ind) {
        for (int i = 0; i + 1 < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                std::reverse(ind.genes.begin() + i, ind.genes.begin() + j + 1);
                const double cost = order_cost(start, targets, ind.genes);
                if (cost < ind.cost)
                    ind.cost = cost;
                else
                    std::reverse(ind.genes.begin() + i, ind.genes.begin() + j + 1);
            }
    };

    for (int gen = 0; gen < p.generations; ++gen) {
        std::vector<Indiv> next;
        next.push_back(best);  // elitism
        while (static_cast<int>(next.size()) < p.population) {
            std::vector<int> child = crossover(tournament().genes, tournament().genes);
            if (m >= 2 && unit(rng) < p.mutation_rate)
                std::swap(child[pick_gene(rng)], child[pick_gene(rng)]);
            const double cost = order_cost(start, targets, child);
            next.push_back({std::move(child), cost});
        }
        pop = std::move(next);
        for (const auto& ind : pop)
            if (ind.cost < best.cost) best = ind;
        polish(best);
        history.push_back(best.cost);
    }
    return best.genes;
}

}  // namespace

RoutePlan plan_aco(const PlanningInstance& inst, const AcoParams& p, Rng& rng) {
    return build_plan(inst, rng, &p, &solve_aco);
}

RoutePlan plan_pso(const PlanningInstance& inst, const PsoParams& p, Rng& rng) {
    return build_plan(inst, rng, &p, &solve_pso);
}

RoutePlan plan_ga(const PlanningInstance& inst, const GaParams& p, Rng& rng) {
    return build_plan(inst, rng, &p, &solve_ga);
}

EpisodeMetrics execute_plan(FarmEnv& env, const RoutePlan& plan) {
    const int n = env.config().n_uav;
    if (static_cast<int>(plan.action_sequences.size()) != n)
        throw std::logic_error("execute_plan: plan/UAV count mismatch");
    const int grid = env.config().geometry.grid_count;
    for (const auto& order : plan.visit_order)
        for (const Cell& c : order)
            if (c[0] < 0 || c[0] >= grid || c[1] < 0 || c[1] >= grid)
                throw std::logic_error("execute_plan: waypoint outside the grid");

    std::vector<std::size_t> cursor(n, 0);
    int steps_done = 0;
    while (!env.episode_done()) {
        bool any_left = false;
        std::vector<std::optional<Action>> actions(n);
        for (int i = 0; i < n; ++i) {
            if (!env.uavs()[i].alive) continue;
            if (cursor[i] < plan.action_sequences[i].size()) {
                actions[i] = plan.action_sequences[i][cursor[i]++];
                any_left = true;
            }
        }
        // Exhausted UAVs hover; one step always runs so the start cells
        // get recognized even under an empty plan.
        if (!any_left && steps_done > 0) break;
        env.step(actions);
        ++steps_done;
    }
    return env.snapshot_metrics();
}

}  // namespace agrisim
