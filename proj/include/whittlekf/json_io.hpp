#pragma once

//---------------------------------------------------------------------------
// Instance files and deterministic output encoding.
//
// Inputs are parsed with a real JSON parser; outputs are assembled by a
// tiny writer so every float prints with exactly 17 significant digits and
// two runs of the same binary produce byte-identical bytes.
//---------------------------------------------------------------------------

#include <string>
#include <vector>

#include "whittlekf/bandit.hpp"
#include "whittlekf/index.hpp"

namespace whittlekf {

// %.17g; non-finite values render as inf/-inf/nan.
std::string fmt_double(double v);

// Minimal JSON assembler: objects/arrays nest, keys/values in call order.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);  // non-finite doubles become strings
  JsonWriter& value(const std::string& s);
  JsonWriter& value(const char* s);
  JsonWriter& value(long long v);
  JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(unsigned long long v);
  JsonWriter& value(bool v);
  // Splices an already-serialized JSON value.
  JsonWriter& raw(const std::string& fragment);
  const std::string& str() const { return out_; }

 private:
  void separator();
  std::string out_;
  std::vector<char> stack_;    // '{' or '['
  std::vector<bool> first_;
  bool pending_key_ = false;
};

// {beta, arms: [{a,b,w,h}...], x0: [...], horizon, m_active}; x0 defaults
// to 1.0 per arm and m_active to 1. Malformed input or failed validation
// throws std::invalid_argument with a self-explanatory message.
BanditInstance load_instance_json(const std::string& text);
BanditInstance load_instance_file(const std::string& path);

// Config echo of the resolved instance, as a JSON fragment.
void write_instance_config(JsonWriter& w, const BanditInstance& inst);

// Nested arrays of per-step rows.
void write_rows(JsonWriter& w, const std::vector<std::vector<int>>& rows);
void write_rows(JsonWriter& w, const std::vector<std::vector<double>>& rows);

std::string sim_result_json(const BanditInstance& inst, const SimResult& res);
std::string sim_result_csv(const BanditInstance& inst, const SimResult& res);
std::string trace_json(const BanditInstance& inst, const KalmanTrace& tr);

}  // namespace whittlekf
