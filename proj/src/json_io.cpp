#include "whittlekf/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace whittlekf {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // merge the zero signs so parse-and-reprint is stable
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void JsonWriter::separator() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!stack_.empty()) {
    if (!first_.back()) out_ += ',';
    first_.back() = false;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ += '{';
  stack_.push_back('{');
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  stack_.pop_back();
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separator();
  out_ += '[';
  stack_.push_back('[');
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  stack_.pop_back();
  first_.pop_back();
  return *this;
}

namespace {
void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}
}  // namespace

JsonWriter& JsonWriter::key(const std::string& k) {
  separator();
  append_escaped(out_, k);
  out_ += ':';
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separator();
  if (std::isfinite(v)) {
    out_ += fmt_double(v);
  } else {
    append_escaped(out_, fmt_double(v));
  }
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
  separator();
  append_escaped(out_, s);
  return *this;
}

JsonWriter& JsonWriter::value(const char* s) { return value(std::string(s)); }

JsonWriter& JsonWriter::value(long long v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(unsigned long long v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separator();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::raw(const std::string& fragment) {
  separator();
  out_ += fragment;
  return *this;
}

namespace {

double require_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw std::invalid_argument(where + " must be a number");
  return j.get<double>();
}

}  // namespace

BanditInstance load_instance_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("instance is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("instance must be a JSON object");
  if (!j.contains("beta")) throw std::invalid_argument("instance needs a beta field");
  if (!j.contains("arms") || !j["arms"].is_array() || j["arms"].empty()) {
    throw std::invalid_argument("instance needs a nonempty arms array");
  }
  if (!j.contains("horizon")) throw std::invalid_argument("instance needs a horizon field");

  BanditInstance inst;
  inst.beta = require_number(j["beta"], "beta");
  if (!j["horizon"].is_number_integer()) {
    throw std::invalid_argument("horizon must be an integer");
  }
  inst.horizon = j["horizon"].get<int>();
  inst.m_active = 1;
  if (j.contains("m_active")) {
    if (!j["m_active"].is_number_integer()) {
      throw std::invalid_argument("m_active must be an integer");
    }
    inst.m_active = j["m_active"].get<int>();
  }
  for (std::size_t i = 0; i < j["arms"].size(); ++i) {
    const nlohmann::json& aj = j["arms"][i];
    const std::string where = "arms[" + std::to_string(i) + "]";
    if (!aj.is_object()) throw std::invalid_argument(where + " must be an object");
    for (const char* field : {"a", "b", "w", "h"}) {
      if (!aj.contains(field)) {
        throw std::invalid_argument(where + " needs field " + field);
      }
    }
    ArmParams<double> arm;
    arm.a = require_number(aj["a"], where + ".a");
    arm.b = require_number(aj["b"], where + ".b");
    arm.weight = require_number(aj["w"], where + ".w");
    arm.cost = require_number(aj["h"], where + ".h");
    arm.beta = inst.beta;
    inst.arms.push_back(arm);
  }
  if (j.contains("x0")) {
    if (!j["x0"].is_array() || j["x0"].size() != inst.arms.size()) {
      throw std::invalid_argument("x0 must be an array with one entry per arm");
    }
    for (std::size_t i = 0; i < j["x0"].size(); ++i) {
      inst.x0.push_back(require_number(j["x0"][i], "x0[" + std::to_string(i) + "]"));
    }
  } else {
    inst.x0.assign(inst.arms.size(), 1.0);
  }
  validate(inst);
  return inst;
}

BanditInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_instance_json(ss.str());
}

void write_instance_config(JsonWriter& w, const BanditInstance& inst) {
  w.begin_object();
  w.key("beta").value(inst.beta);
  w.key("horizon").value(inst.horizon);
  w.key("m_active").value(inst.m_active);
  w.key("arms").begin_array();
  for (const ArmParams<double>& arm : inst.arms) {
    w.begin_object();
    w.key("a").value(arm.a);
    w.key("b").value(arm.b);
    w.key("w").value(arm.weight);
    w.key("h").value(arm.cost);
    w.end_object();
  }
  w.end_array();
  w.key("x0").begin_array();
  for (double x : inst.x0) w.value(x);
  w.end_array();
  w.end_object();
}

void write_rows(JsonWriter& w, const std::vector<std::vector<int>>& rows) {
  w.begin_array();
  for (const std::vector<int>& row : rows) {
    w.begin_array();
    for (int v : row) w.value(v);
    w.end_array();
  }
  w.end_array();
}

void write_rows(JsonWriter& w, const std::vector<std::vector<double>>& rows) {
  w.begin_array();
  for (const std::vector<double>& row : rows) {
    w.begin_array();
    for (double v : row) w.value(v);
    w.end_array();
  }
  w.end_array();
}

std::string sim_result_json(const BanditInstance& inst, const SimResult& res) {
  JsonWriter w;
  w.begin_object();
  w.key("config");
  write_instance_config(w, inst);
  w.key("policy").value(res.policy_name);
  w.key("discounted_cost").value(res.discounted_cost);
  w.key("tail_bound").value(res.tail_bound);
  w.key("actions");
  write_rows(w, res.action_log);
  w.key("variances");
  write_rows(w, res.variance_log);
  w.end_object();
  std::string out = w.str();
  out += '\n';
  return out;
}

std::string sim_result_csv(const BanditInstance& inst, const SimResult& res) {
  JsonWriter cfg;
  write_instance_config(cfg, inst);
  std::string out = "# config: " + cfg.str() + "\n";
  out += "# policy: " + res.policy_name + "\n";
  out += "# discounted_cost: " + fmt_double(res.discounted_cost) + "\n";
  out += "# tail_bound: " + fmt_double(res.tail_bound) + "\n";
  out += "t,arms";
  for (std::size_t i = 0; i < inst.arms.size(); ++i) {
    out += ",x" + std::to_string(i);
  }
  out += ",stage_cost\n";
  for (std::size_t t = 0; t < res.action_log.size(); ++t) {
    out += std::to_string(t) + ",";
    const std::vector<int>& ids = res.action_log[t];
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (k) out += ';';
      out += std::to_string(ids[k]);
    }
    for (double x : res.variance_log[t]) {
      out += "," + fmt_double(x);
    }
    out += "," + fmt_double(stage_cost(inst, res.variance_log[t], ids)) + "\n";
  }
  return out;
}

std::string trace_json(const BanditInstance& inst, const KalmanTrace& tr) {
  JsonWriter w;
  w.begin_object();
  w.key("config");
  write_instance_config(w, inst);
  w.key("policy").value(tr.policy_name);
  w.key("seed").value(static_cast<unsigned long long>(tr.seed));
  w.key("actions");
  write_rows(w, tr.actions);
  w.key("z");
  write_rows(w, tr.z);
  w.key("y");
  write_rows(w, tr.y);
  w.key("zhat");
  write_rows(w, tr.zhat);
  w.key("x");
  write_rows(w, tr.x);
  w.end_object();
  std::string out = w.str();
  out += '\n';
  return out;
}

}  // namespace whittlekf
