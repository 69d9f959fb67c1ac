#include "tcorr/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tcorr {

using nlohmann::json;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

// numbers in emitted tables go through the 12-digit format; machine files
// use the library's full-precision round-trip encoding instead
double emitted(double v) { return std::stod(format_number(v)); }

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec parse_vec(const json& j) {
  if (!j.is_array()) throw ParseError("expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd parse_mat(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols)
      throw ParseError("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json cmat_json(const CMat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMat parse_cmat(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a complex matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols)
      throw ParseError("ragged complex matrix");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = j[r][c];
      if (!e.is_array() || e.size() != 2)
        throw ParseError("complex entries are [re, im] pairs");
      m(r, c) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

std::pair<int, int> parse_ax_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) throw ParseError("expected an \"a,x\" key");
  try {
    return {std::stoi(key.substr(0, comma)), std::stoi(key.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ParseError("bad \"a,x\" key: " + key);
  }
}

std::string ax_key(int a, int x) {
  return std::to_string(a) + "," + std::to_string(x);
}

std::string norm_name(NormKind k) {
  switch (k) {
    case NormKind::euclidean: return "euclidean";
    case NormKind::manhattan: return "manhattan";
    case NormKind::supremum: return "supremum";
  }
  return "";
}

NormKind parse_norm(const std::string& s) {
  if (s == "euclidean") return NormKind::euclidean;
  if (s == "manhattan") return NormKind::manhattan;
  if (s == "supremum") return NormKind::supremum;
  throw ParseError("unknown norm kind: " + s);
}

ClassicalMachine parse_classical(const json& j) {
  ClassicalMachine m;
  m.d = j.at("d").get<int>();
  m.pi = parse_vec(j.at("pi"));
  const json& T = j.at("T");
  int max_a = -1, max_x = -1;
  for (const auto& [key, value] : T.items()) {
    auto [a, x] = parse_ax_key(key);
    max_a = std::max(max_a, a);
    max_x = std::max(max_x, x);
  }
  if (max_a < 0 || max_x < 0) throw ParseError("empty transition table");
  m.n_outputs = max_a + 1;
  m.n_inputs = max_x + 1;
  m.T.assign(static_cast<std::size_t>(m.n_inputs), {});
  for (auto& inst : m.T)
    inst.assign(static_cast<std::size_t>(m.n_outputs), Eigen::MatrixXd());
  for (const auto& [key, value] : T.items()) {
    auto [a, x] = parse_ax_key(key);
    m.T[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)] = parse_mat(value);
  }
  for (const auto& inst : m.T)
    for (const auto& t : inst)
      if (t.size() == 0) throw ParseError("missing transition matrix entry");
  if (!m.valid(1e-9)) throw ValidationError("invalid classical machine");
  return m;
}

json classical_json(const ClassicalMachine& m) {
  json T = json::object();
  for (int x = 0; x < m.n_inputs; ++x)
    for (int a = 0; a < m.n_outputs; ++a)
      T[ax_key(a, x)] =
          mat_json(m.T[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)]);
  return json{{"d", m.d}, {"pi", vec_json(m.pi)}, {"T", std::move(T)}};
}

QuantumMachine parse_quantum(const json& j) {
  QuantumMachine m;
  m.rho0 = parse_cmat(j.at("rho0"));
  for (const json& inst_j : j.at("instruments")) {
    KrausInstrument inst;
    for (const json& branch_list : inst_j) {
      std::vector<CMat> branches;
      for (const json& k : branch_list) branches.push_back(parse_cmat(k));
      if (branches.empty()) throw ParseError("instrument output with no Kraus list");
      inst.kraus.push_back(std::move(branches));
    }
    if (inst.kraus.empty()) throw ParseError("instrument with no outputs");
    m.instruments.push_back(std::move(inst));
  }
  if (m.instruments.empty()) throw ParseError("quantum machine with no inputs");
  if (!is_density_matrix(m.rho0, 1e-9))
    throw ValidationError("rho0 is not a density matrix");
  const int no = m.instruments[0].n_outputs();
  for (const auto& inst : m.instruments) {
    if (inst.dim() != m.dim()) throw ValidationError("Kraus dimension mismatch");
    if (inst.n_outputs() != no) throw ValidationError("inconsistent output count");
    if (!inst.unital(1e-9)) throw ValidationError("instrument is not unital");
  }
  return m;
}

json quantum_json(const QuantumMachine& m) {
  json insts = json::array();
  for (const auto& inst : m.instruments) {
    json outs = json::array();
    for (const auto& branches : inst.kraus) {
      json bl = json::array();
      for (const auto& k : branches) bl.push_back(cmat_json(k));
      outs.push_back(std::move(bl));
    }
    insts.push_back(std::move(outs));
  }
  return json{{"rho0", cmat_json(m.rho0)}, {"instruments", std::move(insts)}};
}

GptMachine parse_gpt(const json& j) {
  GptMachine m;
  m.cone.n = j.at("n").get<int>();
  m.cone.kind = parse_norm(j.at("norm").get<std::string>());
  if (m.cone.n < 1) throw ParseError("cone dimension must be positive");
  m.omega0 = GptState{parse_vec(j.at("omega0"))};
  const json& insts = j.at("instruments");
  int max_a = -1, max_x = -1;
  for (const auto& [key, value] : insts.items()) {
    auto [a, x] = parse_ax_key(key);
    max_a = std::max(max_a, a);
    max_x = std::max(max_x, x);
  }
  if (max_a < 0 || max_x < 0) throw ParseError("empty instrument table");
  m.instruments.assign(static_cast<std::size_t>(max_x + 1),
                       std::vector<GptTransformation>(
                           static_cast<std::size_t>(max_a + 1),
                           GptTransformation::zero(m.cone.n)));
  std::vector<std::vector<bool>> seen(
      static_cast<std::size_t>(max_x + 1),
      std::vector<bool>(static_cast<std::size_t>(max_a + 1), false));
  for (const auto& [key, value] : insts.items()) {
    auto [a, x] = parse_ax_key(key);
    GptTransformation tr;
    if (value.contains("mnp")) {
      const json& mm = value.at("mnp");
      GptEffect f{mm.at("effect").at("t").get<double>(),
                  parse_vec(mm.at("effect").at("x"))};
      tr = mnp_transformation(f, GptState{parse_vec(mm.at("prepared"))});
    } else if (value.contains("block")) {
      const json& b = value.at("block");
      tr.t = b.at("t").get<double>();
      tr.alpha = parse_vec(b.at("alpha"));
      tr.f = parse_vec(b.at("f"));
      tr.B = parse_mat(b.at("B"));
    } else {
      throw ParseError("instrument entry needs \"mnp\" or \"block\"");
    }
    if (tr.alpha.size() != m.cone.n || tr.f.size() != m.cone.n ||
        tr.B.rows() != m.cone.n || tr.B.cols() != m.cone.n)
      throw ParseError("transformation dimension mismatch");
    m.instruments[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)] = tr;
    seen[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)] = true;
  }
  for (const auto& row : seen)
    for (bool s : row)
      if (!s) throw ParseError("missing instrument entry");
  if (!is_valid_state(m.cone, m.omega0, 1e-9))
    throw ValidationError("invalid initial state");
  if (!m.probability_preserving(1e-9))
    throw ValidationError("instruments do not preserve probability");
  const ValidationMode mode = m.cone.kind == NormKind::euclidean
                                  ? ValidationMode::sampled
                                  : ValidationMode::exact;
  for (const auto& inst : m.instruments)
    for (const auto& tr : inst)
      if (!validate_transformation(m.cone, tr, mode, 1e-9))
        throw ValidationError("transformation violates cone positivity");
  return m;
}

json gpt_json(const GptMachine& m) {
  json insts = json::object();
  for (int x = 0; x < m.n_inputs(); ++x)
    for (int a = 0; a < m.n_outputs(); ++a) {
      const auto& tr =
          m.instruments[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)];
      insts[ax_key(a, x)] = json{{"block",
                                  json{{"t", tr.t},
                                       {"alpha", vec_json(tr.alpha)},
                                       {"f", vec_json(tr.f)},
                                       {"B", mat_json(tr.B)}}}};
    }
  return json{{"n", m.cone.n},
              {"norm", norm_name(m.cone.kind)},
              {"omega0", vec_json(m.omega0.w)},
              {"instruments", std::move(insts)}};
}

std::string seq_string(std::size_t packed, int base, int len) {
  if (base > 10) throw std::invalid_argument("alphabet too large for symbol strings");
  Seq s = unpack(packed, base, len);
  std::string out;
  for (int v : s) out.push_back(static_cast<char>('0' + v));
  return out;
}

}  // namespace

MachineFile parse_machine(const json& j) {
  MachineFile mf;
  int payloads = 0;
  payloads += j.contains("classical");
  payloads += j.contains("quantum");
  payloads += j.contains("gpt");
  if (payloads != 1)
    throw ParseError("machine file needs exactly one of classical, quantum, gpt");
  if (j.contains("name")) mf.name = j.at("name").get<std::string>();
  if (j.contains("description"))
    mf.description = j.at("description").get<std::string>();
  if (j.contains("classical")) mf.classical = parse_classical(j.at("classical"));
  if (j.contains("quantum")) mf.quantum = parse_quantum(j.at("quantum"));
  if (j.contains("gpt")) mf.gpt = parse_gpt(j.at("gpt"));
  return mf;
}

json machine_json(const MachineFile& mf) {
  json j = json::object();
  if (!mf.name.empty()) j["name"] = mf.name;
  if (!mf.description.empty()) j["description"] = mf.description;
  if (mf.classical) j["classical"] = classical_json(*mf.classical);
  if (mf.quantum) j["quantum"] = quantum_json(*mf.quantum);
  if (mf.gpt) j["gpt"] = gpt_json(*mf.gpt);
  return j;
}

MachineFile load_machine_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("json parse failure: ") + e.what());
  }
  try {
    return parse_machine(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("machine schema failure: ") + e.what());
  }
}

void save_machine_file(const MachineFile& mf, const std::string& path) {
  write_text_file(path, machine_json(mf).dump(2) + "\n");
}

int file_n_inputs(const MachineFile& mf) {
  if (mf.classical) return mf.classical->n_inputs;
  if (mf.quantum) return mf.quantum->n_inputs();
  return mf.gpt->n_inputs();
}

int file_n_outputs(const MachineFile& mf) {
  if (mf.classical) return mf.classical->n_outputs;
  if (mf.quantum)
    return mf.quantum->instruments.empty()
               ? 0
               : mf.quantum->instruments[0].n_outputs();
  return mf.gpt->n_outputs();
}

CorrelationTable file_table(const MachineFile& mf, int L) {
  if (mf.classical) return machine_table(*mf.classical, L);
  if (mf.quantum) return machine_table(*mf.quantum, L);
  return machine_table(*mf.gpt, L);
}

std::string table_csv(const CorrelationTable& t) {
  std::ostringstream out;
  out << "inputs,outputs,probability\n";
  for (std::size_t xi = 0; xi < t.num_input_seqs(); ++xi)
    for (std::size_t ai = 0; ai < t.num_output_seqs(); ++ai)
      out << seq_string(xi, t.n_inputs, t.length) << ','
          << seq_string(ai, t.n_outputs, t.length) << ','
          << format_number(t.p(static_cast<Eigen::Index>(xi),
                               static_cast<Eigen::Index>(ai)))
          << '\n';
  return out.str();
}

json table_json(const CorrelationTable& t) {
  json p = json::object();
  for (std::size_t xi = 0; xi < t.num_input_seqs(); ++xi) {
    json row = json::object();
    for (std::size_t ai = 0; ai < t.num_output_seqs(); ++ai)
      row[seq_string(ai, t.n_outputs, t.length)] =
          emitted(t.p(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(ai)));
    p[seq_string(xi, t.n_inputs, t.length)] = std::move(row);
  }
  return json{{"length", t.length},
              {"n_inputs", t.n_inputs},
              {"n_outputs", t.n_outputs},
              {"p", std::move(p)}};
}

CorrelationTable parse_table(const json& j) {
  CorrelationTable t(j.at("n_inputs").get<int>(), j.at("n_outputs").get<int>(),
                     j.at("length").get<int>());
  const json& p = j.at("p");
  for (std::size_t xi = 0; xi < t.num_input_seqs(); ++xi) {
    const std::string xs = seq_string(xi, t.n_inputs, t.length);
    for (std::size_t ai = 0; ai < t.num_output_seqs(); ++ai) {
      const std::string as = seq_string(ai, t.n_outputs, t.length);
      t.p(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(ai)) =
          p.at(xs).at(as).get<double>();
    }
  }
  return t;
}

json manifest_json(const RunManifest& m) {
  return json{{"command", m.command}, {"flags", m.flags},
              {"seed", m.seed},       {"version", m.version},
              {"wall_time_s", emitted(m.wall_time_s)},
              {"outputs", m.outputs}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failure on " + path);
}

}  // namespace tcorr
