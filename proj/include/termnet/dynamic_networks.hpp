#pragma once

// Possible-worlds networks: term sets indexed by (user, world, slot),
// utility and message demands, and clairvoyant coding.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "termnet/interpretation.hpp"
#include "termnet/mincut.hpp"
#include "termnet/multiuser.hpp"

namespace termnet {

struct World {
  std::string name;
  double probability = 0.0;
};

struct Slot {
  std::string name;
  double weight = 1.0;
};

struct CellKey {
  std::string user, world, slot;
  auto operator<=>(const CellKey&) const = default;
};

inline std::string to_string(const CellKey& c) { return c.user + "/" + c.world + "/" + c.slot; }

struct UtilityDemand {
  enum class Form { weighted_linear, coefficients };
  std::string user;
  Form form = Form::weighted_linear;
  std::map<std::pair<std::string, std::string>, double> coefficients;  // (world, slot)
  double threshold = 0.0;
  bool strict = true;
};

// Term equation d(received) = variable on one cell's channel.
struct MessageDemand {
  CellKey cell;
  std::string variable;
};

class DynamicNetwork {
 public:
  DynamicNetwork() = default;
  DynamicNetwork(std::vector<std::string> users, std::vector<World> worlds, std::vector<Slot> slots,
                 std::map<CellKey, TermSet> cells, std::vector<UtilityDemand> utility = {},
                 std::vector<MessageDemand> messages = {})
      : users_(std::move(users)), worlds_(std::move(worlds)), slots_(std::move(slots)),
        cells_(std::move(cells)), utility_(std::move(utility)), messages_(std::move(messages)) {
    validate();
  }

  const std::vector<std::string>& users() const noexcept { return users_; }
  const std::vector<World>& worlds() const noexcept { return worlds_; }
  const std::vector<Slot>& slots() const noexcept { return slots_; }
  const std::map<CellKey, TermSet>& cells() const noexcept { return cells_; }
  const std::vector<UtilityDemand>& utility_demands() const noexcept { return utility_; }
  const std::vector<MessageDemand>& message_demands() const noexcept { return messages_; }
  const Signature& signature() const noexcept { return signature_; }

  const TermSet& cell(const CellKey& key) const {
    auto it = cells_.find(key);
    if (it == cells_.end()) throw PreconditionError("no cell " + to_string(key));
    return it->second;
  }
  double probability(const std::string& world) const {
    for (const auto& w : worlds_)
      if (w.name == world) return w.probability;
    throw PreconditionError("unknown world " + world);
  }
  double weight(const std::string& slot) const {
    for (const auto& t : slots_)
      if (t.name == slot) return t.weight;
    throw PreconditionError("unknown slot " + slot);
  }

 private:
  void validate() {
    auto known = [](const auto& list, const std::string& n) {
      for (const auto& e : list)
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, std::string>) {
          if (e == n) return true;
        } else if (e.name == n) {
          return true;
        }
      return false;
    };
    if (worlds_.empty()) throw PreconditionError("a dynamic network needs at least one world");
    double total = 0.0;
    for (const auto& w : worlds_) {
      if (!(w.probability >= 0.0)) throw PreconditionError("negative probability for world " + w.name);
      total += w.probability;
    }
    if (std::abs(total - 1.0) > 1e-12) throw PreconditionError("world probabilities do not sum to 1");
    for (const auto& t : slots_)
      if (!(t.weight >= 0.0)) throw PreconditionError("negative weight for slot " + t.name);

    // Shared signature: union over cells with consistent arities.
    std::vector<Term> all;
    for (const auto& [key, ts] : cells_) {
      if (!known(users_, key.user)) throw PreconditionError("cell names unknown user " + key.user);
      if (!known(worlds_, key.world)) throw PreconditionError("cell names unknown world " + key.world);
      if (!known(slots_, key.slot)) throw PreconditionError("cell names unknown slot " + key.slot);
      all.insert(all.end(), ts.terms().begin(), ts.terms().end());
    }
    signature_ = TermSet(all).signature();

    for (const auto& d : utility_) {
      if (!known(users_, d.user)) throw PreconditionError("demand names unknown user " + d.user);
      for (const auto& [ws, c] : d.coefficients) {
        if (!(c >= 0.0)) throw PreconditionError("utility coefficients must be non-negative");
        if (!known(worlds_, ws.first) || !known(slots_, ws.second))
          throw PreconditionError("coefficient names unknown world or slot");
      }
    }
    for (const auto& m : messages_) {
      const auto& ts = cell(m.cell);
      if (ts.signature().variable_index(m.variable) < 0)
        throw PreconditionError("variable " + m.variable + " does not occur in cell " + to_string(m.cell));
    }
  }

  std::vector<std::string> users_;
  std::vector<World> worlds_;
  std::vector<Slot> slots_;
  std::map<CellKey, TermSet> cells_;
  std::vector<UtilityDemand> utility_;
  std::vector<MessageDemand> messages_;
  Signature signature_;
};

// ---------------------------------------------------------------------------
// File format

inline DynamicNetwork parse_dynamic_network(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("dynamic network file: ") + e.what());
  }
  try {
    std::vector<std::string> users = j.at("users").get<std::vector<std::string>>();
    std::vector<World> worlds;
    for (const auto& w : j.at("worlds")) worlds.push_back({w.at("name"), w.at("probability")});
    std::vector<Slot> slots;
    if (j.contains("slots"))
      for (const auto& t : j.at("slots")) slots.push_back({t.at("name"), t.value("weight", 1.0)});
    else
      slots.push_back({"t1", 1.0});
    const std::string default_slot = slots.front().name;

    std::map<CellKey, TermSet> cells;
    for (const auto& c : j.at("cells")) {
      CellKey key{c.at("user"), c.at("world"), c.value("slot", default_slot)};
      if (!cells.emplace(key, parse_term_set(c.at("termset").get<std::string>())).second)
        throw ParseError("duplicate cell " + to_string(key));
    }
    std::vector<UtilityDemand> utility;
    if (j.contains("utility"))
      for (const auto& d : j.at("utility")) {
        UtilityDemand u;
        u.user = d.at("user");
        const auto form = d.value("form", std::string("weighted_linear"));
        if (form == "coefficients") {
          u.form = UtilityDemand::Form::coefficients;
          for (const auto& c : d.at("coefficients"))
            u.coefficients[{c.at("world"), c.value("slot", default_slot)}] = c.at("value").get<double>();
        } else if (form != "weighted_linear") {
          throw ParseError("unknown utility form '" + form + "'");
        }
        u.threshold = d.value("threshold", 0.0);
        u.strict = d.value("strict", true);
        utility.push_back(std::move(u));
      }
    std::vector<MessageDemand> messages;
    if (j.contains("messages"))
      for (const auto& m : j.at("messages")) {
        CellKey key{m.at("user"), m.at("world"), m.value("slot", default_slot)};
        for (const auto& v : m.at("variables")) messages.push_back({key, v.get<std::string>()});
      }
    return DynamicNetwork(std::move(users), std::move(worlds), std::move(slots), std::move(cells),
                          std::move(utility), std::move(messages));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("dynamic network file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Clairvoyance

namespace detail {

inline Term suffix_symbols(const Term& t, const std::string& suffix) {
  if (!t.is_application()) return t;
  std::vector<Term> args;
  for (const auto& a : t.args) args.push_back(suffix_symbols(a, suffix));
  return Term::apply(t.name + suffix, std::move(args));
}

}  // namespace detail

// Symbol f in world w becomes f_w.
inline DynamicNetwork clairvoyant_diversify(const DynamicNetwork& dn) {
  std::map<CellKey, TermSet> cells;
  for (const auto& [key, ts] : dn.cells()) {
    std::vector<Term> terms;
    for (const auto& t : ts.terms()) terms.push_back(detail::suffix_symbols(t, "_" + key.world));
    cells.emplace(key, TermSet(std::move(terms), ts.required()));
  }
  return DynamicNetwork(dn.users(), dn.worlds(), dn.slots(), std::move(cells), dn.utility_demands(),
                        dn.message_demands());
}

// The same tables installed under every world's name.
inline Interpretation clairvoyant_lift(const Interpretation& interp, const DynamicNetwork& dn) {
  Interpretation out(interp.alphabet_size());
  for (const auto& w : dn.worlds())
    for (const auto& [name, table] : interp.tables()) out.set(table.renamed(name + "_" + w.name));
  return out;
}

// ---------------------------------------------------------------------------
// Measures

struct CellDispersion {
  DispersionValue value;
  bool conditioned = false;  // worst case over the non-required variables
};

using DispersionMatrix = std::map<CellKey, CellDispersion>;

inline CellDispersion cell_dispersion(const TermSet& ts, const Interpretation& interp,
                                      const EvaluationOptions& opt = {}) {
  CellDispersion c;
  if (ts.requires_all()) {
    c.value = dispersion(preimage_histogram(interp, ts, opt));
    return c;
  }
  const auto slices = conditional_slices(interp, ts, ts.required(), opt);
  c.value = DispersionValue::of_count(*std::min_element(slices.begin(), slices.end()),
                                      interp.alphabet_size());
  c.conditioned = true;
  return c;
}

inline DispersionMatrix dispersion_matrix(const DynamicNetwork& dn, const Interpretation& interp,
                                          const EvaluationOptions& opt = {}) {
  interp.check_covers(dn.signature());
  DispersionMatrix m;
  for (const auto& [key, ts] : dn.cells()) m.emplace(key, cell_dispersion(ts, interp, opt));
  return m;
}

namespace detail {

inline double coefficient(const DynamicNetwork& dn, const UtilityDemand& d, const std::string& world,
                          const std::string& slot) {
  if (d.form == UtilityDemand::Form::weighted_linear) return dn.probability(world) * dn.weight(slot);
  auto it = d.coefficients.find({world, slot});
  return it == d.coefficients.end() ? 0.0 : it->second;
}

template <class CellValue>
double utility_sum(const DynamicNetwork& dn, const UtilityDemand& d, CellValue value) {
  double u = 0.0;
  for (const auto& w : dn.worlds())
    for (const auto& t : dn.slots()) {
      const double c = coefficient(dn, d, w.name, t.name);
      if (c == 0.0) continue;
      u += c * value(CellKey{d.user, w.name, t.name});
    }
  return u;
}

}  // namespace detail

inline double utility_value(const DynamicNetwork& dn, const UtilityDemand& d, const DispersionMatrix& m) {
  return detail::utility_sum(dn, d, [&](const CellKey& key) {
    auto it = m.find(key);
    if (it == m.end()) throw PreconditionError("matrix lacks cell " + to_string(key));
    return it->second.value.log_value;
  });
}

inline bool demand_met(const UtilityDemand& d, double value) {
  return d.strict ? value > d.threshold : value >= d.threshold;
}

inline int cell_min_cut(const TermSet& ts) {
  return ts.requires_all() ? min_cut(ts).value : min_cut_wrt(ts, ts.required()).value;
}

inline double asymptotic_max_utility(const DynamicNetwork& dn, const UtilityDemand& d) {
  return detail::utility_sum(dn, d, [&](const CellKey& key) { return static_cast<double>(cell_min_cut(dn.cell(key))); });
}

// One flag per demand, in order.
inline std::vector<bool> message_demands_satisfiable(const DynamicNetwork& dn,
                                                     const std::vector<MessageDemand>& demands,
                                                     const Interpretation& interp, bool clairvoyant,
                                                     const EvaluationOptions& opt = {}) {
  const DynamicNetwork net = clairvoyant ? clairvoyant_diversify(dn) : dn;
  std::vector<bool> out;
  for (const auto& md : demands) {
    const auto& ts = net.cell(md.cell);
    if (ts.signature().variable_index(md.variable) < 0)
      throw PreconditionError("variable " + md.variable + " does not occur in cell " + to_string(md.cell));
    out.push_back(decodable(interp, ts, md.variable, opt));
  }
  return out;
}

// Every cell restricted to its requirement, variables renamed per cell, in
// one disjoint union; components lists the renamed cells in cell order.
struct GlobalReduction {
  TermSet combined;
  std::vector<CellKey> keys;
  std::vector<TermSet> components;
};

inline GlobalReduction global_reduction(const DynamicNetwork& dn) {
  GlobalReduction g;
  std::vector<TermSet> parts;
  for (const auto& [key, ts] : dn.cells()) {
    g.keys.push_back(key);
    parts.push_back(restrict_to_variables(ts, ts.required()));
  }
  g.combined = combine_channels(parts);
  for (std::size_t j = 0; j < parts.size(); ++j) {
    std::vector<Term> terms;
    for (const auto& t : parts[j].terms()) terms.push_back(detail::rename_variables(t, "_" + std::to_string(j + 1)));
    g.components.emplace_back(std::move(terms));
  }
  return g;
}

}  // namespace termnet
