// Acceptance checks. `acceptance N...` runs the listed criteria (all when no
// argument is given), prints one PASS/FAIL line per criterion and exits
// nonzero if any failed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fewshot_toy.hpp"
#include "oracles.hpp"
#include "tfkg/pipeline.hpp"
#include "tfkg/rng.hpp"

using namespace tfkg;
using tfkg::testing::central_difference;
using tfkg::testing::relative_error;

namespace {

bool verdict(int id, bool ok, const std::string& summary) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, summary.c_str());
  std::fflush(stdout);
  return ok;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1

bool criterion1() {
  struct Row {
    int no;
    std::size_t ls, ld, ss, sd;
    double printed;
  };
  const std::array<Row, 8> rows{{{1, 82, 160, 2, 240, 0.6652},
                                 {2, 180, 62, 2, 240, 0.8677},
                                 {3, 184, 58, 10, 232, 0.8595},
                                 {4, 197, 45, 14, 228, 0.8780},
                                 {5, 179, 63, 1, 241, 0.8677},
                                 {6, 177, 65, 1, 241, 0.8636},
                                 {7, 189, 45, 14, 228, 0.8780},
                                 {8, 180, 65, 1, 241, 0.8636}}};
  int bad = 0;
  for (const Row& r : rows) {
    const double v = tfr(r.ls, r.sd, 242);
    const bool ok = std::abs(v - r.printed) <= 0.0005;
    if (!ok) ++bad;
    std::printf("  row %d: tfr(%zu, %zu, 242) = %.5f, printed %.4f, |diff| %.5f%s\n", r.no, r.ls, r.sd, v,
                r.printed, std::abs(v - r.printed), ok ? "" : "  <- outside 0.0005");
    if (r.ls + r.ld != 242) std::printf("         Ls + Ld = %zu, not 242\n", r.ls + r.ld);
  }
  return verdict(1, bad == 0, fmt("%d of 8 table rows reproduced within 0.0005", 8 - bad));
}

// ---------------------------------------------------------------- 2

bool criterion2() {
  std::size_t checked = 0, violations = 0;
  for (std::uint64_t d = 0; d < 5; ++d) {
    PipelineConfig c;
    c.seed = 100 + d;
    const RecordSplit split = prepare_records(c);
    const ClassCounts hc = count_classes(split.train);
    if (hc.fault != 121 || hc.stable != 121) return verdict(2, false, "historical set is not 121 + 121");
    const GbdtModel gbdt = train_gbdt(split.train, c.gbdt);
    for (std::uint64_t i = 0; i < 20; ++i) {
      Rng rng(mix_seed(d, i));
      KgParams kg = init_kg_params(gbdt.total_leaves(), i % 2 ? Norm::l1 : Norm::l2, mix_seed(d, 100 + i));
      for (double& w : kg.weights) w *= rng.uniform(0.0, 3.0);
      TransformerRecord r = split.test[rng.index(split.test.size())];
      if (i % 4 == 3) {
        for (double& f : r.features) f += rng.normal();
      }
      const MatchCounts m = count_matches(kg, gbdt, r, split.train);
      ++checked;
      if (m.ls + m.ld != 242 || m.ss + m.sd != 242 || m.total() != 484) ++violations;
    }
  }
  return verdict(2, checked == 100 && violations == 0,
                 fmt("%zu model/record draws, %zu identity violations", checked, violations));
}

// ---------------------------------------------------------------- 3

FeatureMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, bool coarse) {
  FeatureMatrix x{rows, cols, std::vector<double>(rows * cols)};
  for (double& v : x.values) v = coarse ? static_cast<double>(rng.index(4)) : rng.uniform(-1.0, 1.0);
  return x;
}

double sse(std::span<const double> t, const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0.0;
  double mean = 0.0;
  for (std::size_t i : idx) mean += t[i];
  mean /= static_cast<double>(idx.size());
  double s = 0.0;
  for (std::size_t i : idx) s += (t[i] - mean) * (t[i] - mean);
  return s;
}

double exhaustive_best_gain(const FeatureMatrix& x, std::span<const double> t) {
  std::vector<std::size_t> all(x.rows);
  std::iota(all.begin(), all.end(), 0);
  const double parent = sse(t, all);
  double best = 0.0;
  for (std::size_t f = 0; f < x.cols; ++f) {
    std::set<double> values;
    for (std::size_t i = 0; i < x.rows; ++i) values.insert(x.at(i, f));
    for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
      const double thr = 0.5 * (*it + *std::next(it));
      std::vector<std::size_t> left, right;
      for (std::size_t i = 0; i < x.rows; ++i) (x.at(i, f) <= thr ? left : right).push_back(i);
      best = std::max(best, parent - sse(t, left) - sse(t, right));
    }
  }
  return best;
}

bool criterion3() {
  // (a) leaf values are mean residuals
  double worst_leaf = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    const FeatureMatrix x = random_matrix(rng, 30, 3, false);
    std::vector<double> y(x.rows);
    for (double& v : y) v = rng.uniform(-2.0, 2.0);
    const RegressionTree stump = fit_tree(x, y, 0, 1);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    worst_leaf = std::max(worst_leaf, std::abs(stump.nodes()[0].value - mean));

    GbdtParams p;
    p.n_trees = 5;
    p.max_depth = 2;
    p.min_samples_leaf = 1;
    const GbdtModel m = fit_gbdt(x, y, p);
    std::vector<double> f(x.rows, m.init_score);
    for (const auto& tree : m.trees) {
      std::vector<double> sum(tree.nodes().size(), 0.0), count(tree.nodes().size(), 0.0);
      for (std::size_t i = 0; i < x.rows; ++i) {
        const TreeNode* leaf = &tree.leaf_for(x.row(i));
        const auto k = static_cast<std::size_t>(leaf - tree.nodes().data());
        sum[k] += y[i] - f[i];
        count[k] += 1.0;
      }
      for (std::size_t k = 0; k < tree.nodes().size(); ++k) {
        if (tree.nodes()[k].is_leaf() && count[k] > 0) {
          worst_leaf = std::max(worst_leaf, std::abs(tree.nodes()[k].value - sum[k] / count[k]));
        }
      }
      for (std::size_t i = 0; i < x.rows; ++i) f[i] += m.shrinkage * tree.leaf_for(x.row(i)).value;
    }
  }
  const bool a_ok = worst_leaf <= 1e-12;
  std::printf("  (a) max |leaf - mean residual| = %.3g\n", worst_leaf);

  // (b) greedy split vs exhaustive enumeration
  int b_bad = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(mix_seed(s, 3));
    const std::size_t n = 2 + rng.index(7);
    const FeatureMatrix x = random_matrix(rng, n, 2, s % 2 == 0);
    std::vector<double> y(n);
    for (double& v : y) v = rng.uniform(-1.0, 1.0);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const SplitChoice c = best_split(x, y, all, 1);
    const double oracle = exhaustive_best_gain(x, y);
    const double got = c.found ? c.gain : 0.0;
    if (std::abs(got - oracle) > 1e-12) ++b_bad;
  }
  std::printf("  (b) %d of 50 draws disagree with exhaustive enumeration\n", b_bad);

  // (c) staged training MSE never increases
  int c_bad = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto recs = generate_synthetic(40, 1.0, mix_seed(s, 4));
    const GbdtModel m = train_gbdt(recs, GbdtParams{});
    const auto mse = staged_mse(m, to_matrix(recs), label_targets(recs));
    for (std::size_t i = 1; i < mse.size(); ++i) {
      if (mse[i] > mse[i - 1] + 1e-12) {
        ++c_bad;
        break;
      }
    }
  }
  std::printf("  (c) %d of 20 runs with an increasing training MSE\n", c_bad);
  return verdict(3, a_ok && b_bad == 0 && c_bad == 0, "leaf values, split search and staged MSE");
}

// ---------------------------------------------------------------- 4

struct GradStats {
  int draws = 0;
  double worst = 0.0;
  void add(double analytic, double numeric) { worst = std::max(worst, relative_error(analytic, numeric)); }
};

GradStats kg_gradient_check() {
  GradStats st;
  for (Norm norm : {Norm::l1, Norm::l2}) {
    int done = 0;
    for (std::uint64_t seed = 0; done < 10 && seed < 500; ++seed) {
      Rng rng(mix_seed(seed, 40));
      const std::size_t n = 3 + rng.index(6);
      auto vec = [&](double lo, double hi) {
        std::vector<double> v(n);
        for (double& x : v) x = rng.uniform(lo, hi);
        return v;
      };
      KgParams p{norm, vec(0.5, 1.5), vec(-1, 1), vec(-1, 1)};
      std::vector<std::vector<double>> heads, tails;
      std::vector<Relation> rel;
      const std::size_t b = 1 + rng.index(4);
      for (std::size_t i = 0; i < b; ++i) {
        heads.push_back(vec(0, 1));
        tails.push_back(vec(0, 1));
        rel.push_back(rng.index(2) ? Relation::similar : Relation::non_similar);
      }
      bool kink = false;
      double total = 0.0;
      for (std::size_t i = 0; i < b; ++i) {
        const double e1 = relation_score(p, heads[i], tails[i], rel[i]);
        const double e2 = relation_score(p, heads[i], tails[i], other(rel[i]));
        total += std::max(e1 - e2, 0.0);
        if (std::abs(e1 - e2) < 1e-3) kink = true;
        for (Relation r : {Relation::similar, Relation::non_similar}) {
          for (std::size_t k = 0; k < n; ++k) {
            if (norm == Norm::l1 && std::abs(p.weights[k] * (heads[i][k] - tails[i][k]) + p.relation_vector(r)[k]) < 1e-3)
              kink = true;
          }
        }
      }
      if (kink || total < 1e-3) continue;
      std::vector<KgExample> batch;
      for (std::size_t i = 0; i < b; ++i) batch.push_back({heads[i], tails[i], rel[i]});
      const KgGradients g = kg_gradients(p, batch);
      auto f = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < b; ++i) s += triple_loss(p, heads[i], tails[i], rel[i]);
        return s / static_cast<double>(b);
      };
      for (std::size_t k = 0; k < n; ++k) {
        st.add(g.weights[k], central_difference(f, p.weights[k]));
        st.add(g.r_similar[k], central_difference(f, p.r_similar[k]));
        st.add(g.r_nonsimilar[k], central_difference(f, p.r_nonsimilar[k]));
      }
      ++done;
      ++st.draws;
    }
  }
  return st;
}

GradStats fewshot_gradient_check() {
  GradStats st;
  const auto graph = tfkg::testing::toy_graph();
  for (std::uint64_t seed = 0; st.draws < 10 && seed < 500; ++seed) {
    const auto tasks = sample_tasks(graph, 2, mix_seed(seed, 41));
    const Task& task = tasks[seed % 2];
    Rng rng(mix_seed(seed, 42));
    EmbeddingTable emb = init_embeddings(entity_ids(graph), 4, mix_seed(seed, 43));
    RelationMetaNet net = init_meta_net(4, 3, 6, 0.2, mix_seed(seed, 44));
    for (auto& l : net.layers) {
      for (double& b : l.bias) b = rng.uniform(-0.3, 0.3);
    }
    const double beta = rng.uniform(0.1, 1.0);
    const double gamma = rng.uniform(0.5, 1.5);
    if (tfkg::testing::near_kink(emb, net, task, beta, gamma)) continue;
    const MetaGradients g = task_gradients(emb, net, task, beta, gamma);
    if (g.query_loss == 0.0 || g.support_loss == 0.0) continue;

    // support loss with respect to R
    std::vector<double> r = support_relation(emb, net, task);
    const auto gr = gradient_meta(emb, task.support, r, gamma);
    auto fs = [&] { return support_loss(emb, task.support, r, gamma); };
    for (std::size_t k = 0; k < r.size(); ++k) st.add(gr[k], central_difference(fs, r[k]));

    // query loss after the fast update, all parameters
    auto fq = [&] { return task_query_loss(emb, net, task, beta, gamma); };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      for (std::size_t i = 0; i < net.layers[l].weights.size(); ++i) {
        st.add(g.layers[l].weights[i], central_difference(fq, net.layers[l].weights[i]));
      }
      for (std::size_t i = 0; i < net.layers[l].bias.size(); ++i) {
        st.add(g.layers[l].bias[i], central_difference(fq, net.layers[l].bias[i]));
      }
    }
    for (std::size_t i = 0; i < emb.values.size(); ++i) st.add(g.embeddings[i], central_difference(fq, emb.values[i]));
    ++st.draws;
  }
  return st;
}

bool criterion4() {
  const GradStats kg = kg_gradient_check();
  const GradStats fs = fewshot_gradient_check();
  std::printf("  kg: %d draws, max relative error %.3g (limit 1e-4)\n", kg.draws, kg.worst);
  std::printf("  fewshot: %d draws, max relative error %.3g (limit 1e-3)\n", fs.draws, fs.worst);
  const bool ok = kg.draws >= 20 && kg.worst <= 1e-4 && fs.draws >= 10 && fs.worst <= 1e-3;
  return verdict(4, ok, "analytic gradients vs central differences");
}

// ---------------------------------------------------------------- 5

bool criterion5() {
  bool ok = true;
  for (std::uint64_t s = 0; s < 3; ++s) {
    PipelineConfig c;
    c.seed = 200 + s;
    const RecordSplit split = prepare_records(c);
    const auto triples = build_triples(split.train, 3000, 3000, mix_seed(c.seed, 5));
    const TripleSet unique(triples.begin(), triples.end());
    const RelationCounts rc = count_relations(triples);
    const TripleDataset ds = split_triples(triples, 0.7, mix_seed(c.seed, 6));
    const RelationCounts tr = count_relations(ds.train), te = count_relations(ds.test);
    const TripleSet train_set(ds.train.begin(), ds.train.end());
    std::size_t shared = 0;
    for (const auto& t : ds.test) shared += train_set.count(t);
    const bool row_ok = triples.size() == 6000 && unique.size() == 6000 && rc.similar == 3000 &&
                        rc.non_similar == 3000 && ds.train.size() == 4200 && ds.test.size() == 1800 &&
                        tr.similar == 2100 && tr.non_similar == 2100 && te.similar == 900 &&
                        te.non_similar == 900 && shared == 0;
    std::printf("  seed %llu: %zu triples (%zu unique, %zu/%zu), train %zu (%zu/%zu), test %zu (%zu/%zu), shared %zu\n",
                static_cast<unsigned long long>(c.seed), triples.size(), unique.size(), rc.similar, rc.non_similar,
                ds.train.size(), tr.similar, tr.non_similar, ds.test.size(), te.similar, te.non_similar, shared);
    ok = ok && row_ok;
  }
  return verdict(5, ok, "6000 unique balanced triples split 4200/1800 per relation");
}

// ---------------------------------------------------------------- 6, 7

constexpr std::array<std::uint64_t, 5> kSeeds{7, 8, 9, 10, 11};

std::vector<RunArtifacts> default_runs() {
  std::vector<RunArtifacts> runs;
  const PipelineConfig base = load_config(TFKG_DEFAULT_CONFIG);
  for (std::uint64_t s : kSeeds) {
    PipelineConfig c = base;
    c.seed = s;
    runs.push_back(run_pipeline(c));
  }
  return runs;
}

bool criterion6() {
  const auto runs = default_runs();
  int ge_kg = 0, ge_base = 0;
  double mean = 0.0;
  for (const auto& r : runs) {
    const auto& a = r.accuracy;
    std::printf("  seed %llu: gbdt+kg %.4f  kg-only %.4f  lr %.4f  ann %.4f\n",
                static_cast<unsigned long long>(r.config.seed), a.gbdt_kg, a.kg_only, a.lr, a.ann);
    if (a.gbdt_kg >= a.kg_only) ++ge_kg;
    if (a.kg_only >= std::max(a.lr, a.ann)) ++ge_base;
    mean += a.gbdt_kg / static_cast<double>(runs.size());
  }
  std::printf("  gbdt+kg >= kg-only in %d/5, kg-only >= max(lr, ann) in %d/5, mean gbdt+kg %.4f\n", ge_kg, ge_base,
              mean);
  return verdict(6, ge_kg >= 4 && ge_base >= 4 && mean >= 0.80, "accuracy ordering over 5 seeds");
}

bool criterion7() {
  const auto runs = default_runs();
  int good = 0;
  for (const auto& r : runs) {
    int fault_hi = 0, fault_n = 0, stable_lo = 0, stable_n = 0;
    for (std::size_t i = 0; i < r.tfr.rows.size(); ++i) {
      const double v = r.tfr.rows[i].tfr;
      if (r.records.test[i].label == Label::fault) {
        ++fault_n;
        if (v > 0.5) ++fault_hi;
      } else {
        ++stable_n;
        if (v < 0.5) ++stable_lo;
      }
    }
    const bool ok = fault_hi >= 9 && stable_lo >= 9;
    if (ok) ++good;
    std::printf("  seed %llu: fault tfr > 0.5 %d/%d, stable tfr < 0.5 %d/%d\n",
                static_cast<unsigned long long>(r.config.seed), fault_hi, fault_n, stable_lo, stable_n);
  }
  return verdict(7, good >= 4, fmt("held-out records separated in %d/5 seeds", good));
}

// ---------------------------------------------------------------- 8

bool criterion8() {
  const auto graph = tfkg::testing::toy_graph();
  int updates = 0, descended = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto tasks = sample_tasks(graph, 2, s);
    const EmbeddingTable emb = init_embeddings(entity_ids(graph), 4, mix_seed(s, 80));
    const RelationMetaNet net = init_meta_net(4, 3, 0, 0.01, mix_seed(s, 81));
    for (const auto& task : tasks) {
      const auto r = support_relation(emb, net, task);
      const auto g = gradient_meta(emb, task.support, r, 1.0);
      if (tfkg::testing::l2(g) == 0.0) continue;
      ++updates;
      const double before = support_loss(emb, task.support, r, 1.0);
      double beta = 1.0;
      for (int i = 0; i <= 20; ++i, beta /= 2) {
        if (support_loss(emb, task.support, update_meta(r, g, beta), 1.0) < before) {
          ++descended;
          break;
        }
      }
    }
  }
  std::printf("  fast update: %d of %d tasks with G != 0 reduced the support loss\n", descended, updates);

  int improved = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto tasks = sample_tasks(graph, 2, mix_seed(s, 82));
    MetaHyper h;
    h.dim = 4;
    h.epochs = 50;
    h.seed = mix_seed(s, 83);
    const MetaTrainResult res = train_meta(tasks, h);
    const double best = *std::min_element(res.loss_trace.begin() + 1, res.loss_trace.end());
    if (best < res.loss_trace.front()) ++improved;
    std::printf("  seed %llu: initial query loss %.6f, best after training %.6f\n",
                static_cast<unsigned long long>(s), res.loss_trace.front(), best);
  }
  return verdict(8, updates > 0 && descended == updates && improved == 5,
                 fmt("fast-update descent and meta-training improvement in %d/5 seeds", improved));
}

// ---------------------------------------------------------------- 9

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool criterion9() {
  const std::filesystem::path work = TFKG_WORK_DIR;
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);
  std::vector<std::string> reports;
  for (const char* name : {"a", "b"}) {
    const std::string cmd = std::string("\"") + TFKG_CLI + "\" run --config \"" + TFKG_DEFAULT_CONFIG +
                            "\" --seed 7 --out \"" + (work / name).string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return verdict(9, false, fmt("cli run exited with status %d", rc));
    reports.push_back(slurp(work / name / "report.json"));
  }
  const bool same = !reports[0].empty() && reports[0] == reports[1];
  std::printf("  report.json sizes %zu and %zu bytes\n", reports[0].size(), reports[1].size());
  return verdict(9, same, same ? "report.json byte-identical across runs" : "report.json differs across runs");
}

}  // namespace

int main(int argc, char** argv) {
  const std::array<std::function<bool()>, 9> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                      criterion6, criterion7, criterion8, criterion9};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 9) {
      std::fprintf(stderr, "usage: acceptance [1-9]...\n");
      return 2;
    }
    selected.push_back(n);
  }
  if (selected.empty()) {
    for (int n = 1; n <= 9; ++n) selected.push_back(n);
  }
  bool all = true;
  for (int n : selected) {
    try {
      all = criteria[static_cast<std::size_t>(n - 1)]() && all;
    } catch (const std::exception& e) {
      all = verdict(n, false, std::string("error: ") + e.what()) && all;
    }
  }
  return all ? 0 : 1;
}
