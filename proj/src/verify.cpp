#include <functional>

#include "greenflow/skeleton.hpp"

namespace greenflow {

bool ChecksReport::all_pass() const {
  for (const auto& c : claims) {
    if (c.required && !c.pass) return false;
  }
  return true;
}

namespace {

bool edges_monotone(const SkeletonGraph& g) {
  for (const auto& e : g.edges) {
    for (std::size_t i = 1; i < e.polyline.size(); ++i) {
      if (!(e.polyline[i].value < e.polyline[i - 1].value)) return false;
    }
  }
  return true;
}

// 0 unvisited, 1 on stack, 2 done
bool acyclic(const std::vector<std::vector<int>>& out) {
  std::vector<int> state(out.size(), 0);
  std::function<bool(int)> dfs = [&](int v) {
    state[v] = 1;
    for (int w : out[v]) {
      if (state[w] == 1) return false;
      if (state[w] == 0 && !dfs(w)) return false;
    }
    state[v] = 2;
    return true;
  };
  for (std::size_t v = 0; v < out.size(); ++v) {
    if (state[v] == 0 && !dfs(static_cast<int>(v))) return false;
  }
  return true;
}

}  // namespace

ChecksReport verify_report(const GreenModel& model, const std::vector<CriticalPoint>& zeros,
                           const SkeletonGraph& compact, const SkeletonGraph* open) {
  const auto& topo = model.topology();
  const auto& spec = model.spec();
  ChecksReport rep;
  const int n = static_cast<int>(zeros.size());

  int index_sum = 0, c1 = 0, c1_index = 0, c2_index = 0;
  bool morse = true;
  for (const auto& z : zeros) {
    index_sum += z.index;
    morse = morse && z.m == 2;
    if (z.at_removable_end) {
      c2_index += z.index;
    } else {
      ++c1;
      c1_index += z.index;
    }
  }

  {
    Claim c{"critical_point_bound", "#C <= 2nu + lambda' - 1 and #C <= 2nu + lambda - 1", {}, false, true, 0.0};
    c.add("count", n);
    c.add("bound_conformal", topo.bound_conformal);
    c.add("bound_topological", topo.bound_topological);
    c.pass = n <= topo.bound_conformal && n <= topo.bound_topological;
    rep.claims.push_back(c);
  }
  {
    const bool attained = n == topo.bound_conformal;
    Claim c{"morse_at_bound", "if the conformal bound is attained every zero has m = 2", {}, false, true, 0.0};
    c.add("attained", attained);
    c.add("morse", morse);
    c.pass = !attained || morse;
    rep.claims.push_back(c);
  }
  {
    const int lhs = 1 + index_sum + topo.lambda_prime;
    const int rhs = 2 - 2 * topo.nu;
    Claim c{"index_sum", "1 + sum(1 - m) + lambda' = 2 - 2nu", {}, false, true, 0.0};
    c.add("lhs", lhs);
    c.add("rhs", rhs);
    c.pass = lhs == rhs;
    rep.claims.push_back(c);
  }
  {
    Claim c{"skeleton_homology", "compactified skeleton is connected with beta1 = 2nu", {}, false, true, 0.0};
    c.add("beta0", compact.beta0);
    c.add("beta1", compact.beta1);
    c.add("two_nu", 2 * topo.nu);
    c.add("complete", compact.complete);
    c.pass = compact.complete && compact.beta0 == 1 && compact.beta1 == 2 * topo.nu;
    rep.claims.push_back(c);
  }
  {
    std::vector<std::vector<int>> out(compact.vertices.size());
    for (const auto& e : compact.edges) {
      if (e.source >= 0 && e.sink >= 0) out[e.source].push_back(e.sink);
    }
    bool ends_in_p = true;
    bool branch_count = true;
    for (std::size_t v = 0; v < compact.vertices.size(); ++v) {
      const auto& vx = compact.vertices[v];
      if (out[v].empty() && vx.kind != VertexKind::EndMinimum) ends_in_p = false;
      if (vx.kind != VertexKind::EndMinimum && static_cast<int>(out[v].size()) != zeros[vx.ref].m) {
        branch_count = false;
      }
    }
    const bool mono = edges_monotone(compact);
    const bool dag = acyclic(out);
    Claim c{"chains_end_at_minima",
            "edges strictly decrease, chains are acyclic and end at end minima", {}, false, true, 0.0};
    c.add("edges", static_cast<double>(compact.edges.size()));
    c.add("monotone", mono);
    c.add("acyclic", dag);
    c.add("ends_in_minima", ends_in_p);
    c.add("branches_match_degree", branch_count);
    c.pass = mono && dag && ends_in_p && branch_count && compact.complete;
    rep.claims.push_back(c);
  }
  {
    const int lhs = -c1_index;
    const int rhs = 2 * topo.nu - 1 + topo.lambda1_prime + topo.lambda2 + c2_index;
    Claim c{"removable_balance", "-sum_C1 ind = 2nu - 1 + lambda1' + lambda2 + sum_C2 ind", {}, false, true, 0.0};
    c.add("lhs", lhs);
    c.add("rhs", rhs);
    c.pass = lhs == rhs;
    rep.claims.push_back(c);
  }
  {
    bool removable = false;
    for (const auto& p : spec.punctures) removable = removable || p.removable();
    const bool applies = topo.lambda >= 2 && !removable;
    Claim c{"forced_critical_point", "lambda >= 2 with no removable end forces an interior zero", {}, false, true, 0.0};
    c.add("applies", applies);
    c.add("interior_zeros", c1);
    c.pass = !applies || c1 >= 1;
    rep.claims.push_back(c);
  }
  if (open) {
    Claim c{"open_rank", "open skeleton has beta1 <= 2nu", {}, false, true, 0.0};
    c.add("beta0", open->beta0);
    c.add("beta1", open->beta1);
    c.add("two_nu", 2 * topo.nu);
    c.add("complete", open->complete);
    c.pass = open->complete && open->beta1 <= 2 * topo.nu;
    rep.claims.push_back(c);
  }
  return rep;
}

}  // namespace greenflow
