#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "freecorr/cesaro.hpp"
#include "freecorr/fluctuations.hpp"
#include "freecorr/koopman.hpp"
#include "freecorr/laws.hpp"
#include "freecorr/pauli_oracle.hpp"
#include "freecorr/shift.hpp"
#include "freecorr/symbolic.hpp"
#include "freecorr/text.hpp"

namespace freecorr {

// Everything a run needs, resolved; embedded verbatim in every output
// artifact so any table can be regenerated from its own header.
struct ExperimentConfig {
  std::string subcommand;
  std::string word;
  std::string pattern;
  std::string stream;
  std::string law;
  std::string marginals;
  std::vector<std::string> ops;
  std::vector<std::int64_t> horizons;
  std::int64_t copies = 0;
  int max_moment = 0;
  std::int64_t min_gap = -1;  // -1 leaves each module's default in force
  std::uint64_t seed = 0;
  std::int64_t words = 0;
  std::string input;
  std::string output;
  std::string format = "csv";

  bool operator==(const ExperimentConfig&) const = default;
};

inline nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["subcommand"] = c.subcommand;
  j["word"] = c.word;
  j["pattern"] = c.pattern;
  j["stream"] = c.stream;
  j["law"] = c.law;
  j["marginals"] = c.marginals;
  j["ops"] = c.ops;
  j["horizons"] = c.horizons;
  j["copies"] = c.copies;
  j["max_moment"] = c.max_moment;
  j["min_gap"] = c.min_gap;
  j["seed"] = c.seed;
  j["words"] = c.words;
  j["input"] = c.input;
  j["output"] = c.output;
  j["format"] = c.format;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.subcommand = j.value("subcommand", std::string{});
  c.word = j.value("word", std::string{});
  c.pattern = j.value("pattern", std::string{});
  c.stream = j.value("stream", std::string{});
  c.law = j.value("law", std::string{});
  c.marginals = j.value("marginals", std::string{});
  c.ops = j.value("ops", std::vector<std::string>{});
  c.horizons = j.value("horizons", std::vector<std::int64_t>{});
  c.copies = j.value("copies", std::int64_t{0});
  c.max_moment = j.value("max_moment", 0);
  c.min_gap = j.value("min_gap", std::int64_t{-1});
  c.seed = j.value("seed", std::uint64_t{0});
  c.words = j.value("words", std::int64_t{0});
  c.input = j.value("input", std::string{});
  c.output = j.value("output", std::string{});
  c.format = j.value("format", std::string{"csv"});
  return c;
}

namespace detail {

// Shortest round-trip decimal, '.' separator, locale independent.
inline std::string num_str(double v) { return nlohmann::json(v).dump(); }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline void write_table(std::ostream& os, const ExperimentConfig& c, const Table& t) {
  if (c.format == "json") {
    nlohmann::json j;
    j["config"] = config_json(c);
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    os << j.dump() << '\n';
    return;
  }
  os << "# " << config_json(c).dump() << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) os << ',';
    os << t.columns[i];
  }
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << '\n';
  }
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace detail

struct OracleSuiteResult {
  std::int64_t matches = 0;
  std::int64_t total = 0;
  std::vector<std::string> mismatches;  // word texts, streams appended
};

// Random timed words evaluated through the commutation relations and through
// the Pauli representation; the two integers must agree word by word.
inline OracleSuiteResult run_oracle_suite(std::int64_t words, std::uint64_t seed) {
  if (words < 1) throw std::invalid_argument("need at least one word");
  std::mt19937_64 g(seed);

  std::vector<std::pair<BitStream, std::string>> pool;
  pool.emplace_back(BitStream::constant(0), "constant:0");
  pool.emplace_back(BitStream::constant(1), "constant:1");
  pool.emplace_back(BitStream::thue_morse(), "thue-morse");
  while (pool.size() < 50) {
    if (pool.size() % 2 == 0) {
      const std::size_t len = 1 + g() % 10;
      std::vector<std::uint8_t> bits(len);
      std::string text;
      for (auto& b : bits) {
        b = static_cast<std::uint8_t>(g() % 2);
        text.push_back(static_cast<char>('0' + b));
      }
      pool.emplace_back(BitStream::periodic(std::move(bits)), "periodic:" + text);
    } else {
      const std::uint64_t s = g();
      pool.emplace_back(BitStream::bernoulli(0.5, s),
                        "bernoulli:0.5:seed=" + std::to_string(s));
    }
  }

  OracleSuiteResult out;
  out.total = words;
  for (std::int64_t i = 0; i < words; ++i) {
    const auto& [stream, spec] = pool[g() % pool.size()];
    const std::size_t distinct = 1 + g() % 8;
    std::vector<std::int64_t> times;
    while (times.size() < distinct) {
      const std::int64_t t = static_cast<std::int64_t>(g() % 2000);
      if (std::find(times.begin(), times.end(), t) == times.end()) times.push_back(t);
    }
    TimedWord w;
    const std::size_t len = 1 + g() % 12;
    for (std::size_t j = 0; j < len; ++j) w.times.push_back(times[g() % times.size()]);

    const int by_shift = expectation(w, stream);
    const int by_trace = trace_expectation(w, stream);
    if (by_shift == by_trace) {
      ++out.matches;
    } else if (out.mismatches.size() < 10) {
      std::string text;
      for (const auto t : w.times) text += "e(" + std::to_string(t) + ") ";
      out.mismatches.push_back(text + "[" + spec + "]");
    }
  }
  return out;
}

// Reads the column header of a CSV produced by a run (skipping the config
// comment) and writes a gnuplot script for it; never executes gnuplot.
inline void emit_plot_script(const std::string& csv_path, const std::string& script_path) {
  std::ifstream in(csv_path);
  if (!in) throw parse_error("cannot open CSV", 0, csv_path);
  std::string header;
  while (std::getline(in, header)) {
    if (!header.empty() && header[0] != '#') break;
    header.clear();
  }
  if (header.empty()) throw parse_error("CSV has no column header", 0, csv_path);

  std::ofstream script(script_path);
  if (!script) throw std::runtime_error("cannot write " + script_path);
  script << "set datafile separator \",\"\n";
  script << "set key left top\n";
  if (header == "T,estimate,delta") {
    script << "set logscale x\n";
    script << "set xlabel \"T\"\n";
    script << "set ylabel \"estimate\"\n";
    script << "plot \"" << csv_path << "\" using 1:2 with linespoints title \"estimate\"\n";
  } else if (header == "m,value,gaussian_ref,semicircle_ref") {
    script << "set xlabel \"moment order\"\n";
    script << "set ylabel \"moment\"\n";
    script << "plot \"" << csv_path << "\" using 1:2 with points pointtype 7 title \"value\", \\\n"
           << "     \"" << csv_path << "\" using 1:3 with linespoints title \"gaussian\", \\\n"
           << "     \"" << csv_path << "\" using 1:4 with linespoints title \"semicircle\"\n";
  } else {
    throw parse_error("unknown CSV schema '" + header + "'", 0, csv_path);
  }
}

namespace detail {

inline LawKind law_kind(const std::string& name) {
  if (name == "tensor") return LawKind::tensor;
  if (name == "free") return LawKind::free;
  if (name == "koopman") return LawKind::koopman;
  throw std::invalid_argument("unknown law '" + name + "'");
}

inline int run_expect(const ExperimentConfig& c, std::ostream& os) {
  require(!c.word.empty(), "expect needs --word");
  require(!c.stream.empty(), "expect needs --stream");
  const TimedWord w = parse_timed_word(c.word);
  const BitStream stream = parse_stream_spec(c.stream);
  const int value = expectation(w, stream);
  if (c.format == "json") {
    nlohmann::json j;
    j["config"] = config_json(c);
    j["value"] = value;
    os << j.dump() << '\n';
  } else {
    os << value << '\n';
  }
  return 0;
}

inline int run_cesaro(const ExperimentConfig& c, std::ostream& os) {
  require(!c.pattern.empty(), "cesaro needs --pattern");
  require(!c.stream.empty(), "cesaro needs --stream");
  require(!c.horizons.empty(), "cesaro needs --horizons");
  const TimePattern pat = parse_pattern(c.pattern);
  const BitStream stream = parse_stream_spec(c.stream);
  const std::int64_t min_gap = c.min_gap < 0 ? 0 : c.min_gap;

  const auto eval = [&](std::span<const std::int64_t> times) {
    std::array<std::int64_t, 16> buf{};
    for (std::size_t i = 0; i < pat.slots.size(); ++i)
      buf[i] = times[static_cast<std::size_t>(pat.slots[i] - 1)];
    return expectation_of_times(buf.data(), pat.slots.size(), stream);
  };
  const auto report =
      convergence_report(pat, eval, AveragingSchedule::equal(c.horizons), min_gap);

  Table t{{"T", "estimate", "delta"}, {}};
  for (const auto& row : report.rows)
    t.rows.push_back({std::to_string(row.horizons.at(0)), num_str(row.estimate),
                      row.delta ? num_str(*row.delta) : std::string{}});
  write_table(os, c, t);
  return 0;
}

inline int run_law(const ExperimentConfig& c, std::ostream& os) {
  require(!c.law.empty(), "law needs --law");
  require(!c.word.empty(), "law needs --word");
  require(!c.marginals.empty(), "law needs --marginals (a file, or 'symbolic')");
  const LawKind kind = law_kind(c.law);
  const Word w = parse_word(c.word);

  if (c.marginals == "symbolic") {
    const SymbolicExpr value = law_moment(kind, w, formal_state());
    if (c.format == "json") {
      nlohmann::json j;
      j["config"] = config_json(c);
      j["value"] = value.str();
      os << j.dump() << '\n';
    } else {
      os << value.str() << '\n';
    }
    return 0;
  }

  const auto state = MarginalState<Complex>::from_table(parse_marginal_file(c.marginals));
  const Complex value = law_moment(kind, w, state);
  if (c.format == "json") {
    nlohmann::json j;
    j["config"] = config_json(c);
    j["value"] = {value.real(), value.imag()};
    os << j.dump() << '\n';
  } else {
    os << num_str(value.real()) << ',' << num_str(value.imag()) << '\n';
  }
  return 0;
}

inline int run_koopman(const ExperimentConfig& c, std::ostream& os) {
  require(!c.pattern.empty(), "koopman needs --pattern");
  require(!c.ops.empty(), "koopman needs --ops");
  require(!c.horizons.empty(), "koopman needs --horizons");
  const TimePattern pat = parse_pattern(c.pattern);

  std::vector<FiniteRankOperator> ops;
  ops.reserve(c.ops.size());
  for (const auto& path : c.ops) {
    const FourierObservable f = parse_observable_file(path);
    ops.push_back(FiniteRankOperator::rank_one(f, f).centered());
  }

  const std::optional<std::int64_t> min_gap =
      c.min_gap < 0 ? std::nullopt : std::optional<std::int64_t>(c.min_gap);
  const auto result =
      asymptotic_check(pat, ops, AveragingSchedule::equal(c.horizons), min_gap);

  Table t{{"T", "estimate_re", "estimate_im", "prediction_re", "prediction_im", "abs_error"},
          {}};
  for (const auto& row : result.rows)
    t.rows.push_back({std::to_string(row.horizons.at(0)), num_str(row.estimate.real()),
                      num_str(row.estimate.imag()), num_str(result.prediction.real()),
                      num_str(result.prediction.imag()), num_str(row.abs_error)});
  write_table(os, c, t);
  return 0;
}

inline int run_fluct(const ExperimentConfig& c, std::ostream& os) {
  require(!c.law.empty(), "fluct needs --law");
  require(c.copies >= 1, "fluct needs --N >= 1");
  require(c.max_moment >= 1, "fluct needs --max-moment >= 1");

  std::vector<double> values;
  if (c.law.rfind("shift:", 0) == 0) {
    const BitStream stream = parse_stream_spec(c.law.substr(6));
    const std::int64_t horizon = c.horizons.empty() ? 1000 : c.horizons.at(0);
    const std::int64_t min_gap = c.min_gap < 0 ? 1 : c.min_gap;
    for (int m = 1; m <= c.max_moment; ++m)
      values.push_back(shift_fluctuation_moment(stream, c.copies, m, horizon, min_gap));
  } else {
    const LawKind kind = law_kind(c.law);
    const GeneratorMoments gen = GeneratorMoments::pm_one(c.max_moment);
    for (int m = 1; m <= c.max_moment; ++m)
      values.push_back(sum_moment(kind, gen, c.copies, m));
  }

  const MomentSequence gauss = gaussian_moments(c.max_moment, 1.0);
  const MomentSequence semi = semicircle_moments(c.max_moment, 1.0);
  Table t{{"m", "value", "gaussian_ref", "semicircle_ref"}, {}};
  for (int m = 1; m <= c.max_moment; ++m) {
    const auto i = static_cast<std::size_t>(m - 1);
    t.rows.push_back({std::to_string(m), num_str(values[i]), num_str(gauss.values[i]),
                      num_str(semi.values[i])});
  }
  write_table(os, c, t);
  return 0;
}

inline int run_verify(const ExperimentConfig& c, std::ostream& os) {
  require(c.words >= 1, "verify needs --words >= 1");
  const OracleSuiteResult result = run_oracle_suite(c.words, c.seed);
  if (c.format == "json") {
    nlohmann::json j;
    j["config"] = config_json(c);
    j["matches"] = result.matches;
    j["total"] = result.total;
    j["mismatches"] = result.mismatches;
    os << j.dump() << '\n';
  } else {
    os << result.matches << '/' << result.total << " oracle matches\n";
    for (const auto& m : result.mismatches) os << "mismatch: " << m << '\n';
  }
  return result.matches == result.total ? 0 : 1;
}

inline int run_plot(const ExperimentConfig& c, std::ostream& os) {
  require(!c.input.empty(), "plot needs --input");
  const std::string script = c.output.empty() ? c.input + ".gp" : c.output;
  emit_plot_script(c.input, script);
  os << script << '\n';
  return 0;
}

}  // namespace detail

// Dispatches a parsed config; 0 success, 2 invalid input, 1 runtime failure.
// Validation failures and parse errors report the offending token on err.
inline int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::ofstream file;
    const bool to_file = !config.output.empty() && config.subcommand != "plot";
    if (to_file) {
      file.open(config.output);
      if (!file) throw std::runtime_error("cannot write " + config.output);
    }
    std::ostream& os = to_file ? file : out;

    if (config.subcommand == "expect") return detail::run_expect(config, os);
    if (config.subcommand == "cesaro") return detail::run_cesaro(config, os);
    if (config.subcommand == "law") return detail::run_law(config, os);
    if (config.subcommand == "koopman") return detail::run_koopman(config, os);
    if (config.subcommand == "fluct") return detail::run_fluct(config, os);
    if (config.subcommand == "verify") return detail::run_verify(config, os);
    if (config.subcommand == "plot") return detail::run_plot(config, out);
    throw std::invalid_argument("unknown subcommand '" + config.subcommand + "'");
  } catch (const parse_error& e) {
    err << "freecorr: " << e.what() << '\n';
    return 2;
  } catch (const missing_moment_error& e) {
    err << "freecorr: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "freecorr: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "freecorr: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace freecorr
