#pragma once

#include "sperf/design/design.hpp"
#include "sperf/isom/isom.hpp"
#include "sperf/search/search.hpp"
#include "sperf/structure/structure.hpp"

#include <json.hpp>

namespace sperf::io {

using json = nlohmann::json;

// rationals travel as "p/q" (or "p" when q = 1)
inline json rat(const Rat& r) { return to_string(r); }
inline json integer(const Int& z) { return z.get_str(); }

inline Rat parse_rat_json(const json& j) {
  if (j.is_string()) return parse_rat(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long>());
  throw std::invalid_argument("expected a rational, got " + j.dump());
}

inline json rat_vec(const QVec& v) {
  json a = json::array();
  for (auto& x : v) a.push_back(rat(x));
  return a;
}

inline json rat_mat(const QMat& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) a.push_back(rat_vec(m.row(i)));
  return a;
}

inline json int_mat(const IMat& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols; ++j) {
      const Int& e = m(i, j);
      if (e.fits_slong_p())
        r.push_back(e.get_si());
      else
        r.push_back(e.get_str());
    }
    a.push_back(r);
  }
  return a;
}

inline QMat parse_rat_mat(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a nonempty matrix");
  std::size_t r = j.size(), c = j[0].size();
  QMat m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (j[i].size() != c) throw std::invalid_argument("ragged matrix");
    for (std::size_t k = 0; k < c; ++k) m(i, k) = parse_rat_json(j[i][k]);
  }
  return m;
}

inline IMat parse_int_mat(const json& j) { return to_int_exact(parse_rat_mat(j)); }

inline json lattice(const Lattice& l) {
  json j{{"label", l.label}, {"dim", l.dim()}, {"gram", rat_mat(l.gram)}, {"det", rat(l.determinant())}};
  if (l.lineage) j["lineage"] = {{"parent", l.lineage->parent}, {"rows", int_mat(l.lineage->rows)}};
  return j;
}

// accepts {"gram": [...], "label": ...} or a bare Gram matrix
inline Lattice parse_lattice(const json& j) {
  if (j.is_array()) return Lattice(parse_rat_mat(j));
  if (!j.contains("gram")) throw std::invalid_argument("lattice JSON needs a \"gram\" field");
  return Lattice(parse_rat_mat(j.at("gram")), j.value("label", std::string()));
}

inline json shell(const Shell& s) {
  json vs = json::array();
  for (auto& v : s.vectors) vs.push_back(v);
  return {{"norm", rat(s.norm)}, {"count", s.vectors.size()}, {"vectors", vs}};
}

inline json design_verdict(const DesignVerdict& v) {
  json j{{"t", v.t}, {"pass", v.pass}, {"s", integer(v.s)}, {"min", rat(v.m)}};
  if (v.witness) j["witness"] = {{"alpha", rat_vec(*v.witness)}, {"lhs", rat(v.lhs)}, {"rhs", rat(v.rhs)}};
  return j;
}

inline json fingerprint(const Fingerprint& f) {
  json shells = json::object(), prods = json::object();
  for (auto& [k, c] : f.shells) shells[to_string(k)] = c;
  for (auto& [k, c] : f.min_products) prods[to_string(k)] = c;
  return {{"dim", f.dim}, {"det", rat(f.det)}, {"min", rat(f.min)}, {"shells", shells}, {"min_products", prods}};
}

inline json root_decomposition(const RootDecomposition& r) {
  json comps = json::array();
  for (auto& c : r.components) comps.push_back({{"type", c.type}, {"rank", c.basis.size()}, {"roots", c.roots}});
  return {{"label", r.label()}, {"rank", r.rank()}, {"roots", r.roots}, {"components", comps}};
}

inline json class_system(const ClassSystem& c) {
  return {{"classes", c.classes.size()},
          {"orthogonal_pairs", c.orthogonal_pairs},
          {"plus_pairs", c.plus_pairs},
          {"minus_pairs", c.minus_pairs}};
}

inline json disc_group(const DiscGroup& g) {
  json orders = json::array(), qs = json::array();
  for (auto& d : g.orders) orders.push_back(d);
  for (std::size_t i = 0; i < g.orders.size(); ++i) qs.push_back(rat(g.q(g.generator(i))));
  return {{"order", integer(g.order())}, {"invariants", orders}, {"q_generators", qs}};
}

inline json search_summary(const SearchResult& r) {
  return {{"candidates", r.candidates},
          {"pruned", r.pruned},
          {"survivors", r.survivors.size()},
          {"nodes", r.nodes},
          {"partitions", r.partitions},
          {"resumed", r.resumed}};
}

}  // namespace sperf::io
