#include "vlcsec/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace vlcsec {

namespace {

using nlohmann::json;

const std::vector<std::string> kAllSchemes = {
    "direct", "fc", "fc-zf", "sc", "sc-zf", "sc-mlse", "fc-case2"};

Matrix preset_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = static_cast<Eigen::Index>(rows.begin()->size());
  Matrix M(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) M(i, j++) = x;
    ++i;
  }
  return M;
}

void preset_channels(const std::string& name, Matrix& Hb, Matrix& He) {
  const Matrix Hb1 = preset_matrix({{0.8143, 0.2435, 0.9293, 0.3500}});
  const Matrix He1 = preset_matrix({{0.3034, 0.2489, 0.1160, 0.0267}});
  const Matrix Hb2 = preset_matrix({{0.9218, 1.2922, 1.1557, 1.3491},
                                    {1.4157, 1.4595, 0.5357, 1.4340}});
  const Matrix He2 = preset_matrix({{0.1787, 0.2431, 0.1555, 0.2060},
                                    {0.2577, 0.1078, 0.3288, 0.4682}});
  if (name == "group1") {
    Hb = Hb1;
    He = He1;
  } else if (name == "group2") {
    Hb = Hb2;
    He = He2;
  } else if (name == "group1-case2") {
    Hb = Hb1.transpose();
    He = He1.transpose();
  } else if (name == "group2-case2") {
    Hb = Hb2.transpose();
    He = He2.transpose();
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
}

Matrix parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ConfigError("field '" + field + "' must be an array of rows");
  }
  const std::size_t cols = j[0].size();
  Matrix M(static_cast<Eigen::Index>(j.size()),
           static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ConfigError("field '" + field + "' is not rectangular");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) {
        throw ConfigError("field '" + field + "' has a non-numeric entry");
      }
      const double x = j[i][k].get<double>();
      if (x < 0.0) {
        throw ConfigError("field '" + field + "' has a negative entry");
      }
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = x;
    }
  }
  return M;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::StepSize:
      return "StepTol";
    case Termination::ObjectiveChange:
      return "ObjTol";
    case Termination::MaxIters:
      return "MaxIters";
    case Termination::AllZFInfeasible:
      return "AllZFInfeasible";
  }
  return "unknown";
}

struct Row {
  double snr = 0.0;
  std::string scheme;
  std::string rate;  // blank when no rate is defined for the outcome
  int iterations = 0;
  std::string termination = "none";
  double feasibility_residual = 0.0;
  double zf_residual = 0.0;
  std::string status = "ok";
  double wall_ms = 0.0;

  std::string render() const {
    std::ostringstream os;
    os << fmt(snr) << ',' << scheme << ',' << rate << ',' << iterations << ','
       << termination << ',' << fmt(feasibility_residual) << ','
       << fmt(zf_residual) << ',' << status << ',' << fmt(wall_ms);
    return os.str();
  }
};

std::string sanitize(std::string msg) {
  std::replace(msg.begin(), msg.end(), ',', ';');
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return msg;
}

double to_base(double nats, double base) {
  return base == 2.0 ? nats / std::log(2.0) : nats;
}

SecrecyRate direct_rate(const WiretapChannel& ch,
                        const IntensityProfile& profile) {
  return ch.kase == ChannelCase::CaseI
             ? secrecy_rate_case1(ch.Hb, ch.He, profile)
             : secrecy_rate_case2(ch.Hb, ch.He, profile);
}

Row run_point(const Scenario& sc, const WiretapChannel& ch, double snr,
              const std::string& scheme) {
  Row row;
  row.snr = snr;
  row.scheme = scheme;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const double A = std::pow(10.0, snr / 20.0);
    const auto profile = build_profile(A, sc.alpha);
    if (scheme == "direct" ||
        (scheme == "sc" && ch.kase == ChannelCase::CaseII)) {
      const auto r = direct_rate(ch, profile);
      row.rate = fmt(to_base(r.clamped, sc.log_base));
      if (scheme == "sc") {
        row.status = "degenerated-to-direct: no complement transmitters";
      }
    } else if (scheme == "fc-zf" && ch.kase == ChannelCase::CaseII) {
      row.status =
          "rejected-zf-infeasible: only the all-zero beamformer satisfies the "
          "nulling equalities in this regime";
    } else {
      SCARun run;
      if (scheme == "fc") {
        run = run_full(ch, profile, false, sc.sca);
      } else if (scheme == "fc-zf") {
        run = run_full(ch, profile, true, sc.sca);
      } else if (scheme == "sc") {
        run = run_sub(ch, profile, false, sc.sca);
      } else if (scheme == "sc-zf") {
        run = run_sub(ch, profile, true, sc.sca);
      } else if (scheme == "sc-mlse") {
        run = run_sub_mlse(ch, profile, sc.sca);
      } else if (scheme == "fc-case2") {
        run = run_case2(ch, profile, sc.sca);
      } else {
        throw ConfigError("unknown scheme '" + scheme + "'");
      }
      row.iterations = run.iterations;
      row.termination = termination_name(run.termination);
      row.feasibility_residual = run.feasibility_residual;
      row.zf_residual = run.zf_residual;
      if (run.termination == Termination::AllZFInfeasible) {
        row.status = "AllZFInfeasible";
      } else {
        row.rate = fmt(to_base(run.rate.clamped, sc.log_base));
      }
    }
  } catch (const std::exception& e) {
    row.rate.clear();
    row.status = sanitize(e.what());
  }
  const auto t1 = std::chrono::steady_clock::now();
  row.wall_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
          t1 - t0)
          .count();
  return row;
}

int thread_budget() {
  if (const char* env = std::getenv("VLC_SECRECY_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string run_sweep(const Scenario& sc,
                      const std::vector<std::string>& schemes) {
  const auto ch = WiretapChannel::make(sc.Hb, sc.He);
  struct Task {
    double snr;
    std::string scheme;
  };
  std::vector<Task> tasks;
  for (double snr : sc.snr_db) {
    for (const auto& s : schemes) tasks.push_back({snr, s});
  }
  std::vector<Row> rows(tasks.size());
  const int nthreads = std::min(
      thread_budget(),
      static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      rows[i] = run_point(sc, ch, tasks[i].snr, tasks[i].scheme);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream os;
  os << "snr_db,scheme,rate,iterations,termination,feasibility_residual,"
        "zf_residual,status,wall_ms\n";
  for (const auto& r : rows) os << r.render() << '\n';
  return os.str();
}

}  // namespace

Scenario preset_scenario(const std::string& name) {
  Scenario sc;
  preset_channels(name, sc.Hb, sc.He);
  for (int s = 0; s <= 70; s += 5) sc.snr_db.push_back(s);
  sc.alpha = Vector::Constant(sc.Hb.cols(), 0.3);
  sc.schemes = {"direct"};
  return sc;
}

Scenario parse_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");

  Scenario sc;
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) throw ConfigError("field 'preset' must be a string");
    preset_channels(j["preset"].get<std::string>(), sc.Hb, sc.He);
  } else {
    if (!j.contains("Hb") || !j.contains("He")) {
      throw ConfigError("fields 'Hb' and 'He' are required without a preset");
    }
    sc.Hb = parse_matrix(j["Hb"], "Hb");
    sc.He = parse_matrix(j["He"], "He");
  }
  if (sc.Hb.cols() != sc.He.cols()) {
    throw ConfigError("fields 'Hb' and 'He' must have the same column count");
  }
  const Eigen::Index nT = sc.Hb.cols();

  if (!j.contains("snr_db")) throw ConfigError("field 'snr_db' is required");
  if (!j["snr_db"].is_array()) throw ConfigError("field 'snr_db' must be an array");
  for (const auto& v : j["snr_db"]) {
    if (!v.is_number()) throw ConfigError("field 'snr_db' has a non-numeric entry");
    sc.snr_db.push_back(v.get<double>());
  }

  if (!j.contains("alpha")) throw ConfigError("field 'alpha' is required");
  if (j["alpha"].is_number()) {
    sc.alpha = Vector::Constant(nT, j["alpha"].get<double>());
  } else if (j["alpha"].is_array()) {
    if (static_cast<Eigen::Index>(j["alpha"].size()) != nT) {
      throw ConfigError("field 'alpha' length must equal the transmitter count");
    }
    sc.alpha.resize(nT);
    for (Eigen::Index i = 0; i < nT; ++i) {
      if (!j["alpha"][static_cast<std::size_t>(i)].is_number()) {
        throw ConfigError("field 'alpha' has a non-numeric entry");
      }
      sc.alpha[i] = j["alpha"][static_cast<std::size_t>(i)].get<double>();
    }
  } else {
    throw ConfigError("field 'alpha' must be a number or an array");
  }
  for (Eigen::Index i = 0; i < nT; ++i) {
    if (!(sc.alpha[i] > 0.0 && sc.alpha[i] < 1.0)) {
      throw ConfigError("field 'alpha' entries must lie strictly in (0, 1)");
    }
  }

  if (!j.contains("schemes")) throw ConfigError("field 'schemes' is required");
  if (!j["schemes"].is_array() || j["schemes"].empty()) {
    throw ConfigError("field 'schemes' must be a non-empty array");
  }
  for (const auto& v : j["schemes"]) {
    if (!v.is_string()) throw ConfigError("field 'schemes' has a non-string entry");
    const std::string s = v.get<std::string>();
    if (std::find(kAllSchemes.begin(), kAllSchemes.end(), s) ==
        kAllSchemes.end()) {
      throw ConfigError("field 'schemes' has unknown scheme '" + s + "'");
    }
    sc.schemes.push_back(s);
  }

  if (j.contains("log_base")) {
    const auto& v = j["log_base"];
    if (v.is_string() && v.get<std::string>() == "2") {
      sc.log_base = 2.0;
    } else if (v.is_string() && v.get<std::string>() == "e") {
      sc.log_base = M_E;
    } else if (v.is_number() && v.get<double>() == 2.0) {
      sc.log_base = 2.0;
    } else {
      throw ConfigError("field 'log_base' must be \"2\" or \"e\"");
    }
  }

  if (j.contains("sca")) {
    const auto& s = j["sca"];
    if (!s.is_object()) throw ConfigError("field 'sca' must be an object");
    auto num = [&](const char* key, double& dst) {
      if (s.contains(key)) {
        if (!s[key].is_number()) {
          throw ConfigError(std::string("field 'sca.") + key +
                            "' must be a number");
        }
        dst = s[key].get<double>();
      }
    };
    num("tau", sc.sca.tau);
    num("gamma0", sc.sca.gamma0);
    num("gamma_decay", sc.sca.gamma_decay);
    num("tol_step", sc.sca.tol_step);
    num("tol_obj", sc.sca.tol_obj);
    num("qp_tol", sc.sca.qp_tol);
    if (s.contains("max_iters")) {
      if (!s["max_iters"].is_number_integer() ||
          s["max_iters"].get<int>() < 1) {
        throw ConfigError("field 'sca.max_iters' must be a positive integer");
      }
      sc.sca.max_iters = s["max_iters"].get<int>();
    }
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str());
}

void validate_schemes(const Scenario& sc) {
  const ChannelCase kase =
      classify_case(sc.Hb.cols(), sc.Hb.rows(), sc.He.rows());
  if (kase == ChannelCase::Unsupported) {
    throw CaseError("channel dimensions fit neither covered case");
  }
  for (const auto& s : sc.schemes) {
    if (kase == ChannelCase::CaseI) {
      if (s == "fc-case2") {
        throw CaseError("scheme 'fc-case2' is undefined for this channel case");
      }
    } else {
      // Case II: fc-zf yields a documented rejection row and sc degenerates
      // to direct, so both stay accepted here.
      if (s == "fc" || s == "sc-zf" || s == "sc-mlse") {
        throw CaseError("scheme '" + s +
                        "' is undefined for this channel case");
      }
    }
  }
}

std::string run_rate_csv(const Scenario& sc) {
  validate_schemes(sc);
  return run_sweep(sc, {"direct"});
}

std::string run_optimize_csv(const Scenario& sc) {
  validate_schemes(sc);
  return run_sweep(sc, sc.schemes);
}

}  // namespace vlcsec
