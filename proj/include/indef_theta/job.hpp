#pragma once

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "examples.hpp"
#include "numeric.hpp"

namespace indef_theta {

using Json = nlohmann::json;

/// Optional numeric section of a job: tau samples for the completion check.
struct NumericSpec {
  std::vector<Complex> taus;
  double tol = 1e-7;
};

/// A job file: the data of one family sum plus what to compare it with.
struct Job {
  std::string name;
  IMatrix form;
  RationalVector coneRef;
  std::optional<RationalVector> c1;  // shared first cone vector; coneRef when every term says "auto"
  std::vector<ThetaTerm> terms;
  RationalVector lambda;
  std::optional<RationalVector> twistB;
  Rational maxQ = 300;
  std::string variant = "almost";  // almost | holomorphic | cyclotomic
  Rational prefactor = 1;
  std::string identity;
  std::optional<NumericSpec> numeric;
};

namespace job_detail {

[[noreturn]] inline void schema(const std::string &what) { fail(ErrorCode::SchemaError, what); }

inline Rational rational_of(const Json &j, const std::string &where) {
  if (j.is_number_integer()) return make_rational(j.get<long long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  schema(where + ": expected an integer or a \"p/q\" string");
}

inline RationalVector vector_of(const Json &j, const std::string &where) {
  if (!j.is_array()) schema(where + ": expected an array");
  RationalVector v;
  for (const auto &x : j) v.push_back(rational_of(x, where));
  return v;
}

inline IMatrix matrix_of(const Json &j, const std::string &where) {
  if (!j.is_array() || j.empty()) schema(where + ": expected a nonempty array of rows");
  std::size_t n = j.size();
  IMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) schema(where + ": expected a square integer matrix");
    for (std::size_t k = 0; k < n; ++k) {
      if (!j[i][k].is_number_integer()) schema(where + ": matrix entries must be integers");
      m(i, k) = j[i][k].get<long long>();
    }
  }
  return m;
}

inline Json matrix_json(const IMatrix &m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

inline Json vector_json(const RationalVector &v) {
  Json out = Json::array();
  for (const auto &x : v) out.push_back(format_rational_short(x));
  return out;
}

// m: {"kronecker": [{"D": -3, "a": [1, 1]}, ...]} | {"period": L, "table": [...]} | {"twist": [b...]}
inline PeriodicWeight weight_of(const Json &j, const QuadraticForm &form) {
  std::size_t n = form.dim();
  if (!j.is_object()) schema("m: expected an object");
  if (j.contains("kronecker")) {
    std::vector<std::pair<long long, IntVector>> chars;
    for (const auto &c : j.at("kronecker")) {
      if (!c.contains("D") || !c.contains("a")) schema("m.kronecker entries need D and a");
      chars.emplace_back(c.at("D").get<long long>(), c.at("a").get<IntVector>());
    }
    return PeriodicWeight::kronecker_product(n, chars);
  }
  if (j.contains("table")) {
    if (!j.contains("period")) schema("m.table needs a period");
    std::vector<Cyclotomic> values;
    for (const auto &x : j.at("table")) values.emplace_back(rational_of(x, "m.table"));
    return PeriodicWeight::from_table(j.at("period").get<long long>(), n, std::move(values));
  }
  if (j.contains("twist")) return PeriodicWeight::twist(form, vector_of(j.at("twist"), "m.twist"));
  schema("m: expected kronecker, table or twist");
}

inline Json weight_json(const PeriodicWeight &m) {
  if (!m.is_rational()) schema("only rational weight tables can be written");
  Json table = Json::array();
  for (const auto &v : m.values()) table.push_back(format_rational_short(v.rational_part()));
  return Json{{"period", m.period()}, {"table", table}};
}

} // namespace job_detail

inline Job parse_job(const Json &j) {
  using namespace job_detail;
  if (!j.is_object()) schema("job: expected an object");
  for (const auto &[key, value] : j.items()) {
    static const std::vector<std::string> known = {"name",    "form",    "coneRef",   "terms",    "lambda",  "twistB",
                                                   "maxQ",    "variant", "prefactor", "identity", "numeric"};
    if (std::find(known.begin(), known.end(), key) == known.end()) schema("unknown key '" + key + "'");
  }
  for (const char *key : {"form", "coneRef", "terms", "maxQ"})
    if (!j.contains(key)) schema(std::string("missing key '") + key + "'");
  Job job;
  job.name = j.value("name", std::string("job"));
  job.form = matrix_of(j.at("form"), "form");
  QuadraticForm form = make_form(job.form);
  std::size_t n = form.dim();
  job.coneRef = vector_of(j.at("coneRef"), "coneRef");
  if (job.coneRef.size() != n) fail(ErrorCode::DimensionMismatch, "coneRef length");
  job.lambda = j.contains("lambda") ? vector_of(j.at("lambda"), "lambda") : RationalVector(n, Rational(0));
  if (job.lambda.size() != n) fail(ErrorCode::DimensionMismatch, "lambda length");
  if (j.contains("twistB")) {
    job.twistB = vector_of(j.at("twistB"), "twistB");
    if (job.twistB->size() != n) fail(ErrorCode::DimensionMismatch, "twistB length");
  }
  job.maxQ = rational_of(j.at("maxQ"), "maxQ");
  if (job.maxQ <= 0) schema("maxQ must be positive");
  job.variant = j.value("variant", std::string("almost"));
  if (job.variant != "almost" && job.variant != "holomorphic" && job.variant != "cyclotomic")
    schema("variant must be almost, holomorphic or cyclotomic");
  if (j.contains("prefactor")) job.prefactor = rational_of(j.at("prefactor"), "prefactor");
  job.identity = j.value("identity", std::string());
  if (!job.identity.empty()) parse_eta_expr(job.identity);  // fail early on a bad spec
  if (!j.at("terms").is_array() || j.at("terms").empty()) schema("terms: expected a nonempty array");
  for (const auto &t : j.at("terms")) {
    if (!t.contains("g") || !t.contains("f")) schema("each term needs g and f");
    ThetaTerm term{matrix_of(t.at("g"), "g"), parse_polynomial(t.at("f").get<std::string>(), n), std::nullopt};
    if (term.g.rows() != n) fail(ErrorCode::DimensionMismatch, "g size");
    if (t.contains("m")) term.m = weight_of(t.at("m"), form);
    if (job.twistB) {
      PeriodicWeight tw = PeriodicWeight::twist(form, *job.twistB);
      term.m = term.m ? *term.m * tw : tw;
    }
    if (t.contains("c1") && !(t.at("c1").is_string() && t.at("c1").get<std::string>() == "auto")) {
      RationalVector c = vector_of(t.at("c1"), "c1");
      if (job.c1 && *job.c1 != c) schema("all terms of a family share c1");
      job.c1 = c;
    }
    job.terms.push_back(std::move(term));
  }
  if (j.contains("numeric")) {
    const Json &num = j.at("numeric");
    NumericSpec ns;
    ns.tol = num.value("tol", 1e-7);
    for (const auto &t : num.at("taus")) {
      if (!t.is_array() || t.size() != 2) schema("numeric.taus entries are [x, y]");
      ns.taus.emplace_back(t[0].get<double>(), t[1].get<double>());
    }
    job.numeric = ns;
  }
  return job;
}

inline Job load_job(const std::string &path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open job file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception &e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  try {
    return parse_job(j);
  } catch (const Json::exception &e) {
    fail(ErrorCode::SchemaError, path + ": " + e.what());
  }
}

inline Json job_to_json(const Job &job) {
  using namespace job_detail;
  if (job.twistB) schema("jobs with twistB are not written back (the twist is folded into m)");
  Json j;
  j["name"] = job.name;
  j["form"] = matrix_json(job.form);
  j["coneRef"] = vector_json(job.coneRef);
  Json terms = Json::array();
  for (const auto &t : job.terms) {
    Json term{{"c1", job.c1 ? vector_json(*job.c1) : Json("auto")}, {"g", matrix_json(t.g)}, {"f", format_polynomial(t.f)}};
    if (t.m) term["m"] = weight_json(*t.m);
    terms.push_back(term);
  }
  j["terms"] = terms;
  j["lambda"] = vector_json(job.lambda);
  j["maxQ"] = format_rational_short(job.maxQ);
  j["variant"] = job.variant;
  if (job.prefactor != 1) j["prefactor"] = format_rational_short(job.prefactor);
  if (!job.identity.empty()) j["identity"] = job.identity;
  if (job.numeric) {
    Json taus = Json::array();
    for (const auto &t : job.numeric->taus) taus.push_back({t.real(), t.imag()});
    j["numeric"] = {{"taus", taus}, {"tol", job.numeric->tol}};
  }
  return j;
}

/// The built-in example as a job (weights written as tables).
inline Job job_from_example(const Example &e) {
  Job job;
  job.name = e.id;
  job.form = e.A;
  job.coneRef = e.c;
  job.terms = e.terms;
  job.lambda = RationalVector(e.c.size(), Rational(0));
  job.maxQ = e.maxQ;
  bool rational = true;
  for (const auto &t : e.terms)
    if (t.m && !t.m->is_rational()) rational = false;
  job.variant = !rational ? "cyclotomic" : e.almost ? "almost" : "holomorphic";
  job.prefactor = e.prefactor;
  job.identity = e.identity;
  return job;
}

inline ThetaFamily job_family(const Job &job) {
  QuadraticForm form = make_form(job.form);
  RationalVector c = job.c1 ? *job.c1 : job.coneRef;
  return ThetaFamily{form, make_cone_vector(form, c, job.coneRef), job.lambda, job.terms, job.maxQ};
}

/// Outcome of a job: the canonical series text and report lines.
struct JobResult {
  bool ok = true;
  std::string series;
  std::vector<std::string> report;
};

/// Expands the family sum (condition enforced) in the ring named by the variant.
inline std::string expand_job(const Job &job) {
  ThetaFamily fam = job_family(job);
  if (job.variant == "cyclotomic") return theta_sum_cyclotomic(fam).scaled(Cyclotomic(job.prefactor)).to_text();
  WSeries s = theta_sum(fam).scaled(WPoly(job.prefactor));
  if (job.variant == "holomorphic") return w_part(s, 0).to_text();
  return s.to_text();
}

/// expand + identity comparison + optional numeric completion checks.
inline JobResult verify_job(const Job &job, const NumericConfig &cfg = {}) {
  if (job.identity.empty()) fail(ErrorCode::SchemaError, "verify needs an identity");
  JobResult res;
  ThetaFamily fam = job_family(job);
  EtaExpr rhs = parse_eta_expr(job.identity);
  std::ostringstream head;
  if (job.variant == "cyclotomic") {
    CycloSeries lhs = theta_sum_cyclotomic(fam).scaled(Cyclotomic(job.prefactor)).truncated(job.maxQ);
    res.series = lhs.to_text();
    WSeries r = rhs.expand(job.maxQ);
    if (rhs.has_completion()) fail(ErrorCode::SchemaError, "the cyclotomic variant compares holomorphic identities only");
    auto diff = first_difference(lhs, to_cyclo(w_part(r, 0)));
    res.ok = !diff;
    head << job.name << ": identity " << job.identity << " to q^" << format_rational_short(job.maxQ) << ", "
         << lhs.size() << " nonzero coefficients: " << (res.ok ? "PASS" : "FAIL");
    if (diff)
      head << " (first difference at q^" << format_rational_short(*diff) << ": theta " << format_coeff(lhs.coefficient(*diff))
           << ", identity " << format_coeff(to_cyclo(w_part(r, 0)).coefficient(*diff)) << ")";
  } else {
    WSeries theta = theta_sum(fam).scaled(WPoly(job.prefactor));
    bool almost = job.variant == "almost";
    res.series = (almost ? theta : to_w(w_part(theta, 0))).truncated(job.maxQ).to_text();
    IdentityReport rep = compare_identity(theta, rhs, job.maxQ, almost);
    res.ok = rep.ok;
    head << job.name << ": identity " << job.identity << " to q^" << format_rational_short(job.maxQ) << ", " << rep.nonzero
         << " nonzero coefficients: " << (rep.ok ? "PASS" : "FAIL");
    if (rep.firstDiff)
      head << " (first difference at q^" << format_rational_short(*rep.firstDiff) << ": theta " << rep.thetaCoeff
           << ", identity " << rep.identityCoeff << ")";
  }
  res.report.push_back(head.str());
  if (job.numeric) {
    if (job.variant == "cyclotomic") fail(ErrorCode::SchemaError, "numeric checks need rational weights");
    for (const auto &t : job.numeric->taus) {
      auto r = check_completion_equality(fam, UpperHalfPoint(t), job.numeric->tol, cfg);
      res.report.push_back(r.line());
      res.ok = res.ok && r.passed();
    }
  }
  return res;
}

/// Gamma_0(N) checks on the unweighted theta of each term with g c independent of c.
inline std::vector<CheckReport> check_job_modularity(const Job &job, int gammas, int taus, double tol, std::uint64_t seed,
                                                     const NumericConfig &cfg = {}) {
  ThetaFamily fam = job_family(job);
  for (const auto &x : fam.lambda)
    if (x != 0) fail(ErrorCode::SchemaError, "modularity checks need lambda = 0");
  std::mt19937_64 rng(seed);
  std::vector<CheckReport> out;
  for (std::size_t i = 0; i < fam.terms.size(); ++i) {
    const auto &t = fam.terms[i];
    RationalVector gc = t.g.cast<Rational>() * fam.c.c;
    if (linearly_dependent(gc, fam.c.c)) continue;
    ThetaSpec s{fam.form, fam.c, make_cone_vector(fam.form, gc, fam.c.c), t.f, fam.lambda, std::nullopt, fam.maxQ};
    for (int a = 0; a < taus; ++a) {
      UpperHalfPoint tau = random_tau(rng);
      for (int b = 0; b < gammas; ++b)
        out.push_back(check_gamma_transform(s, random_gamma0(fam.form.level(), rng), tau, tol, cfg,
                                            job.name + " term " + std::to_string(i + 1)));
    }
  }
  return out;
}

} // namespace indef_theta
