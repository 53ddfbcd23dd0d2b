#include "swarmstab/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace swarmstab {

ScenarioError::ScenarioError(Kind kind, int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) {
  throw ScenarioError(ScenarioError::Kind::Parse, line_of(n), what);
}

[[noreturn]] void invalid(const YAML::Node& n, const std::string& what) {
  throw ScenarioError(ScenarioError::Kind::Invariant, line_of(n), what);
}

std::string scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) fail(n, key + " must be a scalar");
  return n.Scalar();
}

Rate rate_of(const YAML::Node& n, const std::string& key) {
  try {
    return Rate::parse(scalar(n, key));
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(n, key + ": " + e.what());
  }
}

Rational rational_of(const YAML::Node& n, const std::string& key) {
  try {
    return parse_rational(scalar(n, key));
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(n, key + ": " + e.what());
  }
}

template <class T>
T as(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, key + " has the wrong type");
  }
}

std::vector<int> int_list(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) fail(n, key + " must be a list");
  std::vector<int> out;
  for (const auto& e : n) out.push_back(as<int>(e, key));
  return out;
}

void check_keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& kv : n) {
    const auto k = kv.first.as<std::string>();
    if (!allowed.count(k)) fail(kv.first, "unknown key '" + k + "' in " + where);
  }
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(ScenarioError::Kind::Parse, e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw ScenarioError(ScenarioError::Kind::Parse, 1, "config must be a mapping");
  check_keys(root,
             {"K", "Us", "mu", "gamma", "arrivals", "policy", "coded", "q", "horizon", "replications", "seed",
              "threads", "designated_piece", "out", "sweep", "lyapunov", "watched"},
             "config");
  Scenario s;
  auto& p = s.params;
  if (!root["K"]) throw ScenarioError(ScenarioError::Kind::Parse, 1, "missing K");
  p.K = as<int>(root["K"], "K");
  if (p.K < 1 || p.K > kMaxPieces) invalid(root["K"], "K must lie in [1, " + std::to_string(kMaxPieces) + "]");
  if (root["Us"]) p.Us = rate_of(root["Us"], "Us");
  if (root["mu"]) p.mu = rate_of(root["mu"], "mu");
  if (root["gamma"]) p.gamma = rate_of(root["gamma"], "gamma");
  if (p.Us.is_inf()) invalid(root["Us"], "Us must be finite");
  if (p.mu.is_inf() || p.mu.is_zero()) invalid(root["mu"] ? root["mu"] : root, "mu must be positive and finite");
  if (p.gamma.is_zero()) invalid(root["gamma"], "gamma must be positive");
  if (root["coded"]) p.coded = as<bool>(root["coded"], "coded");
  if (root["q"]) {
    if (!p.coded) fail(root["q"], "q is only meaningful with coded: true");
    p.q = as<int>(root["q"], "q");
    if (!is_prime_power(p.q) || p.q > 256) invalid(root["q"], "q must be a prime power <= 256");
  } else if (p.coded) {
    fail(root["coded"], "coded mode needs q");
  }
  const YAML::Node arr = root["arrivals"];
  if (!arr) throw ScenarioError(ScenarioError::Kind::Parse, 1, "missing arrivals");
  if (!arr.IsSequence()) fail(arr, "arrivals must be a list");
  if (arr.size() == 0) invalid(arr, "arrivals must not be empty (lambda_total > 0 required)");
  for (const auto& a : arr) {
    if (!a.IsMap()) fail(a, "each arrival must be a mapping");
    check_keys(a, {"pieces", "rate", "uniform", "vectors"}, "arrival");
    if (!a["rate"]) fail(a, "arrival needs a rate");
    Rate r = rate_of(a["rate"], "rate");
    if (r.is_inf()) invalid(a["rate"], "arrival rate must be finite");
    if (a["uniform"] || a["vectors"]) {
      if (!p.coded) fail(a, "uniform/vectors arrivals need coded: true");
      if (a["pieces"]) fail(a["pieces"], "pieces cannot be combined with uniform/vectors");
      CodedArrival ca;
      ca.rate = r;
      if (a["uniform"]) ca.uniform_vectors = as<int>(a["uniform"], "uniform");
      if (ca.uniform_vectors < 0) invalid(a["uniform"], "uniform must be >= 0");
      if (a["vectors"]) {
        if (!a["vectors"].IsSequence()) fail(a["vectors"], "vectors must be a list of lists");
        for (const auto& v : a["vectors"]) {
          auto vec = int_list(v, "vector");
          if (static_cast<int>(vec.size()) != p.K) invalid(v, "coding vector needs K entries");
          for (int e : vec)
            if (e < 0 || e >= p.q) invalid(v, "coding vector entries must lie in [0, q)");
          ca.vectors.push_back(vec);
        }
      }
      p.coded_arrivals.push_back(std::move(ca));
      continue;
    }
    const auto pieces = a["pieces"] ? int_list(a["pieces"], "pieces") : std::vector<int>{};
    for (int k : pieces)
      if (k < 1 || k > p.K) invalid(a["pieces"], "piece " + std::to_string(k) + " outside 1..K");
    Arrival ar{PieceSet::of(p.K, pieces), r};
    if (ar.type.is_full() && p.gamma.is_inf() && !r.is_zero())
      invalid(a, "gamma = inf forbids arrivals holding every piece");
    p.arrivals.push_back(ar);
  }
  if (p.lambda_total() <= 0) invalid(arr, "lambda_total must be positive");
  try {
    p.validate();
  } catch (const std::exception& e) {
    invalid(root, e.what());
  }
  if (root["policy"]) {
    try {
      s.policy = parse_policy(scalar(root["policy"], "policy"));
    } catch (const std::invalid_argument& e) {
      fail(root["policy"], e.what());
    }
  }
  if (root["horizon"]) {
    s.horizon = as<double>(root["horizon"], "horizon");
    if (!(s.horizon > 0)) invalid(root["horizon"], "horizon must be positive");
  }
  if (root["replications"]) {
    s.replications = as<int>(root["replications"], "replications");
    if (s.replications < 1) invalid(root["replications"], "replications must be >= 1");
  }
  if (root["seed"]) s.seed = as<std::uint64_t>(root["seed"], "seed");
  if (root["threads"]) {
    s.threads = as<int>(root["threads"], "threads");
    if (s.threads < 1) invalid(root["threads"], "threads must be >= 1");
  }
  if (root["designated_piece"]) {
    s.designated_piece = as<int>(root["designated_piece"], "designated_piece");
    if (s.designated_piece < 1 || s.designated_piece > p.K)
      invalid(root["designated_piece"], "designated_piece outside 1..K");
  }
  if (root["out"]) s.out = scalar(root["out"], "out");
  if (const auto sw = root["sweep"]) {
    if (!sw.IsMap()) fail(sw, "sweep must be a mapping");
    check_keys(sw, {"param", "values", "from", "to", "steps"}, "sweep");
    if (!sw["param"]) fail(sw, "sweep needs param");
    if (!sw["param"].IsScalar()) fail(sw["param"], "multi-parameter sweeps are not supported");
    SweepSpec spec;
    spec.param = sw["param"].Scalar();
    if (sw["values"]) {
      if (sw["from"] || sw["to"] || sw["steps"]) fail(sw, "give either values or from/to/steps");
      if (!sw["values"].IsSequence() || sw["values"].size() == 0) fail(sw["values"], "values must be a non-empty list");
      for (const auto& v : sw["values"]) spec.values.push_back(rational_of(v, "sweep value"));
    } else {
      if (!sw["from"] || !sw["to"] || !sw["steps"]) fail(sw, "sweep needs values or from/to/steps");
      const Rational lo = rational_of(sw["from"], "from"), hi = rational_of(sw["to"], "to");
      const int steps = as<int>(sw["steps"], "steps");
      if (steps < 1) invalid(sw["steps"], "steps must be >= 1");
      for (int i = 0; i < steps; ++i)
        spec.values.push_back(steps == 1 ? lo : lo + (hi - lo) * Rational(i, steps - 1));
    }
    try {
      for (const auto& v : spec.values) apply_sweep(p, spec.param, v);
    } catch (const ScenarioError& e) {
      throw ScenarioError(e.kind(), line_of(sw["param"]), e.what());
    } catch (const std::exception& e) {
      invalid(sw, std::string("sweep value rejected: ") + e.what());
    }
    s.sweep = std::move(spec);
  }
  if (const auto ly = root["lyapunov"]) {
    if (!ly.IsMap()) fail(ly, "lyapunov must be a mapping");
    check_keys(ly, {"samples", "pilot_samples"}, "lyapunov");
    if (ly["samples"]) s.lyap_samples = as<int>(ly["samples"], "samples");
    if (ly["pilot_samples"]) s.lyap_pilot = as<int>(ly["pilot_samples"], "pilot_samples");
    if (s.lyap_samples < 1 || s.lyap_pilot < 1) invalid(ly, "sample counts must be >= 1");
  }
  if (const auto w = root["watched"]) {
    if (!w.IsMap()) fail(w, "watched must be a mapping");
    check_keys(w, {"z_samples", "n"}, "watched");
    if (w["z_samples"]) s.watched_z_samples = as<int>(w["z_samples"], "z_samples");
    if (w["n"]) s.watched_n = as<std::int64_t>(w["n"], "n");
    if (s.watched_z_samples < 1 || s.watched_n < 1) invalid(w, "watched counts must be >= 1");
  }
  return s;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

std::string format_scenario(const Scenario& s) {
  const auto& p = s.params;
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "K" << YAML::Value << p.K;
  e << YAML::Key << "Us" << YAML::Value << p.Us.str();
  e << YAML::Key << "mu" << YAML::Value << p.mu.str();
  e << YAML::Key << "gamma" << YAML::Value << p.gamma.str();
  if (p.coded) {
    e << YAML::Key << "coded" << YAML::Value << true;
    e << YAML::Key << "q" << YAML::Value << p.q;
  }
  e << YAML::Key << "arrivals" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : p.arrivals) {
    e << YAML::BeginMap << YAML::Key << "pieces" << YAML::Value << YAML::Flow << a.type.pieces();
    e << YAML::Key << "rate" << YAML::Value << a.rate.str() << YAML::EndMap;
  }
  for (const auto& a : p.coded_arrivals) {
    e << YAML::BeginMap;
    if (a.uniform_vectors) e << YAML::Key << "uniform" << YAML::Value << a.uniform_vectors;
    if (!a.vectors.empty()) {
      e << YAML::Key << "vectors" << YAML::Value << YAML::BeginSeq;
      for (const auto& v : a.vectors) e << YAML::Flow << v;
      e << YAML::EndSeq;
    }
    e << YAML::Key << "rate" << YAML::Value << a.rate.str() << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::Key << "policy" << YAML::Value << policy_name(s.policy);
  e << YAML::Key << "horizon" << YAML::Value << s.horizon;
  e << YAML::Key << "replications" << YAML::Value << s.replications;
  e << YAML::Key << "seed" << YAML::Value << s.seed;
  e << YAML::Key << "threads" << YAML::Value << s.threads;
  e << YAML::Key << "designated_piece" << YAML::Value << s.designated_piece;
  e << YAML::Key << "out" << YAML::Value << s.out;
  if (s.sweep) {
    e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "param" << YAML::Value << s.sweep->param;
    e << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& v : s.sweep->values) e << format_rational(v);
    e << YAML::EndSeq << YAML::EndMap;
  }
  e << YAML::Key << "lyapunov" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "samples" << YAML::Value << s.lyap_samples;
  e << YAML::Key << "pilot_samples" << YAML::Value << s.lyap_pilot << YAML::EndMap;
  e << YAML::Key << "watched" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "z_samples" << YAML::Value << s.watched_z_samples;
  e << YAML::Key << "n" << YAML::Value << s.watched_n << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

SwarmParams apply_sweep(const SwarmParams& p, const std::string& param, const Rational& v) {
  SwarmParams q = p;
  static const std::regex arrival_rate(R"(arrivals\[(\d+)\]\.rate)");
  std::smatch m;
  if (param == "Us") {
    q.Us = v;
  } else if (param == "mu") {
    q.mu = v;
  } else if (param == "gamma") {
    q.gamma = v;
  } else if (param == "1/gamma") {
    q.gamma = v == 0 ? Rate::infinity() : Rate(Rational(1) / v);
  } else if (std::regex_match(param, m, arrival_rate)) {
    const auto i = std::stoul(m[1].str());
    const auto na = q.arrivals.size();
    if (i < na)
      q.arrivals[i].rate = v;
    else if (i < na + q.coded_arrivals.size())
      q.coded_arrivals[i - na].rate = v;
    else
      throw ScenarioError(ScenarioError::Kind::Parse, 0, "sweep index " + m[1].str() + " out of range");
  } else {
    throw ScenarioError(ScenarioError::Kind::Parse, 0, "unknown sweep parameter '" + param + "'");
  }
  q.validate();
  return q;
}

}  // namespace swarmstab
