#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "csr/capacity.hpp"
#include "csr/coloring.hpp"
#include "csr/dynamics.hpp"
#include "csr/game.hpp"
#include "csr/graph.hpp"
#include "csr/tree.hpp"

namespace csr {

using Json = nlohmann::json;

// --- graphs -----------------------------------------------------------------
// Two interchangeable formats: JSON {"n": .., "edges": [[u,v], ..]} and plain
// text ("n m" header line, one "u v" pair per line).

inline Json graph_to_json(const Graph& g) {
  Json j;
  j["n"] = g.n;
  Json edges = Json::array();
  for (auto [u, v] : g.edges) edges.push_back(Json::array({u, v}));
  j["edges"] = std::move(edges);
  return j;
}

inline Graph graph_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges")) {
    throw Error("graph json needs fields n and edges");
  }
  int n = j.at("n").get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw Error("graph json edge must be a pair");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return load_graph(n, std::move(edges));
}

inline Graph graph_from_edge_list_text(std::istream& in) {
  int n = 0, m = 0;
  if (!(in >> n >> m)) throw Error("edge list text needs a 'n m' header line");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i) {
    int u = 0, v = 0;
    if (!(in >> u >> v)) {
      throw Error("edge list text ended after " + std::to_string(i) + " of " +
                  std::to_string(m) + " edges");
    }
    edges.emplace_back(u, v);
  }
  return load_graph(n, std::move(edges));
}

inline std::string graph_to_edge_list_text(const Graph& g) {
  std::ostringstream out;
  out << g.n << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges) out << u << ' ' << v << '\n';
  return out.str();
}

// Sniffs the format: a leading '{' means JSON, anything else the text form.
inline Graph parse_graph(const std::string& content) {
  for (char c : content) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    if (c == '{') return graph_from_json(Json::parse(content));
    break;
  }
  std::istringstream in(content);
  return graph_from_edge_list_text(in);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

inline Graph load_graph_file(const std::string& path) { return parse_graph(read_file(path)); }

inline Json stats_to_json(const GraphStats& s) {
  return Json{{"diameter", s.diameter},
              {"degrees", s.degrees},
              {"d_min", s.min_degree},
              {"lambda_max", s.spectral_radius}};
}

// --- profiles ---------------------------------------------------------------

inline Json profile_to_json(const AllocationProfile& p) { return Json(p.values()); }

inline AllocationProfile profile_from_json(const Json& j) {
  if (!j.is_array()) throw Error("profile json must be an array of resource indices");
  return AllocationProfile(j.get<std::vector<int>>());
}

inline Json multi_profile_to_json(const MultiAllocationProfile& p) {
  Json j = Json::array();
  for (const auto& a : p.assignment) j.push_back(a);
  return j;
}

inline MultiAllocationProfile multi_profile_from_json(const Json& j) {
  if (!j.is_array()) throw Error("multi profile json must be an array of arrays");
  MultiAllocationProfile p;
  for (const auto& a : j) p.assignment.push_back(a.get<std::vector<int>>());
  return p;
}

// --- traces -----------------------------------------------------------------

inline Json radius_to_json(Radius r) {
  if (r.is_unbounded()) return Json("unbounded");
  return Json(r.value());
}

inline Json radius_vector_to_json(const RadiusVector& rv) {
  return Json{{"counts", rv.counts}, {"unbounded", rv.unbounded_count}};
}

inline Json event_to_json(const UpdateEvent& ev) {
  Json j;
  j["t"] = ev.t;
  j["agent"] = ev.agent;
  j["from"] = ev.from_resource;
  j["to"] = ev.to_resource;
  j["old_radius"] = ev.old_radius;
  j["new_radius"] = radius_to_json(ev.new_radius);
  Json exact = Json::array();
  for (const auto& d : ev.decreased_exactly_to_rprime) {
    exact.push_back(Json::array({d.agent, d.old_radius}));
  }
  j["decreased_exactly"] = std::move(exact);
  Json other = Json::array();
  for (const auto& d : ev.other_decreases) {
    other.push_back(Json::array({d.agent, radius_to_json(d.old_radius), radius_to_json(d.new_radius)}));
  }
  j["other_decreases"] = std::move(other);
  j["bad_case"] = ev.bad_case;
  j["rv_before"] = radius_vector_to_json(ev.rv_before);
  j["rv_after"] = radius_vector_to_json(ev.rv_after);
  return j;
}

inline Json bound_report_to_json(const BoundReport& rep) {
  Json j;
  j["T"] = rep.T;
  j["bound_thm4"] = rep.bound_thm4;
  j["bound_thm5"] = rep.bound_thm5;
  j["bound_cor"] = rep.bound_cor.str();
  j["bound_naive"] = rep.bound_naive.str();
  j["potential_sum"] = rep.potential_sum;
  j["max_update_radius"] = rep.max_update_radius;
  j["bad_case_count"] = rep.bad_case_count;
  j["terminated"] = rep.terminated;
  j["thm4_applicable"] = rep.thm4_applicable;
  j["thm4_ok"] = rep.thm4_ok;
  j["thm5_applicable"] = rep.thm5_applicable;
  j["thm5_ok"] = rep.thm5_ok;
  j["cor_applicable"] = rep.cor_applicable;
  j["cor_ok"] = rep.cor_ok;
  return j;
}

// One event per line, then a summary line carrying the bound report.
inline void write_trace_jsonl(std::ostream& out, const Game& game, const Trace& trace) {
  Json header;
  header["header"] = Json{{"n", trace.n},
                          {"k", trace.k},
                          {"diameter", trace.diameter},
                          {"scheduler", scheduler_name(trace.scheduler)},
                          {"seed", trace.seed},
                          {"initial_profile", profile_to_json(trace.initial_profile)}};
  out << header.dump() << '\n';
  for (const UpdateEvent& ev : trace.events) out << event_to_json(ev).dump() << '\n';
  Json footer;
  footer["summary"] = bound_report_to_json(bound_report(game, trace));
  footer["summary"]["final_profile"] = profile_to_json(trace.final_profile);
  out << footer.dump() << '\n';
}

inline void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "t,agent,r,r_prime,bad_case\n";
  for (const UpdateEvent& ev : trace.events) {
    out << ev.t << ',' << ev.agent << ',' << ev.old_radius << ',';
    if (ev.new_radius.is_unbounded()) {
      out << "unbounded";
    } else {
      out << ev.new_radius.value();
    }
    out << ',' << (ev.bad_case ? 1 : 0) << '\n';
  }
}

// --- planning / coloring / tree ---------------------------------------------

inline Json plan_to_json(const CapacityPlan& plan) {
  Json j;
  j["y_star"] = plan.y_star;
  j["y_ceil"] = plan.y_ceil;
  j["total_extra"] = plan.total_extra;
  j["objective"] = plan.objective;
  j["normalized"] = plan.normalized;
  j["lambda_max"] = plan.lambda_max;
  j["dual"] = plan.dual;
  return j;
}

inline Json coloring_report_to_json(const ColoringReport& report) {
  Json j;
  if (report.h) {
    j["h"] = *report.h;
    j["witness"] = profile_to_json(*report.witness);
    j["r_star"] = report.r_star;
    j["matched"] = report.matched;
    j["r_star_from_unbounded"] = report.r_star_from_unbounded;
    j["final_proper_for_h"] = report.final_proper_for_h;
    j["final_profile"] = profile_to_json(report.final_profile);
    j["terminated"] = report.terminated;
  } else {
    j["h"] = nullptr;
    j["witness"] = nullptr;
    j["r_star"] = nullptr;
    j["matched"] = nullptr;
  }
  return j;
}

inline Json tree_result_to_json(const TreeSolveResult& result) {
  Json j;
  j["root"] = result.order.root;
  j["levels"] = result.order.levels;
  j["visit_order"] = result.order.visit_order;
  j["profile"] = profile_to_json(result.profile);
  return j;
}

}  // namespace csr
