#include "epictrl/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <string>

#include "epictrl/errors.hpp"

namespace epictrl {

namespace {

using nlohmann::json;

using FieldSetter = std::function<void(const json&, const std::string& path)>;

void apply_object(const json& doc, const std::string& path,
                  const std::map<std::string, FieldSetter>& fields)
{
    if (!doc.is_object())
        throw ConfigInvalid("config key '" + (path.empty() ? std::string("<root>") : path) +
                            "' must be an object");
    for (const auto& [key, value] : doc.items()) {
        const std::string full = path.empty() ? key : path + "." + key;
        const auto it = fields.find(key);
        if (it == fields.end())
            throw ConfigInvalid("unknown config key '" + full + "'");
        it->second(value, full);
    }
}

template <typename T>
FieldSetter number(T& target)
{
    return [&target](const json& v, const std::string& path) {
        if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number())
                throw ConfigInvalid("config key '" + path + "' must be a number");
            target = v.get<T>();
        } else {
            if (!v.is_number_integer())
                throw ConfigInvalid("config key '" + path + "' must be an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0)
                    target = v.get<T>();
                else
                    throw ConfigInvalid("config key '" + path + "' must be non-negative");
            } else {
                target = v.get<T>();
            }
        }
    };
}

FieldSetter text(std::string& target)
{
    return [&target](const json& v, const std::string& path) {
        if (!v.is_string())
            throw ConfigInvalid("config key '" + path + "' must be a string");
        target = v.get<std::string>();
    };
}

} // namespace

void ToolkitConfig::validate() const
{
    env_config().validate();
    train_config().validate();
    if (output_dir.empty())
        throw ConfigInvalid("output_dir must not be empty");
}

EnvConfig ToolkitConfig::env_config() const
{
    return {disease, effects, weights, initial_infected_fraction, sim};
}

TrainConfig ToolkitConfig::train_config() const
{
    TrainConfig t = train;
    t.seed = seed;
    return t;
}

json effects_to_json(const EffectsTable& table)
{
    json out = json::object();
    for (Restriction r : kAllRestrictions)
        out[std::string(name(r))] = {{"beta_multiplier", table[r].beta_multiplier},
                                     {"zeta", table[r].zeta}};
    return out;
}

json ToolkitConfig::to_json() const
{
    const auto& t = train;
    return {
        {"disease",
         {{"N", disease.N},
          {"beta", disease.beta},
          {"sigma", disease.sigma},
          {"gamma", disease.gamma},
          {"mu", disease.mu}}},
        {"restrictions", effects_to_json(effects)},
        {"reward", {{"preset", reward_preset}, {"r", weights.r}, {"s", weights.s}}},
        {"environment",
         {{"initial_infected_fraction", initial_infected_fraction},
          {"max_days", sim.max_days},
          {"termination_threshold", sim.termination_threshold}}},
        {"training",
         {{"episodes", t.episodes},
          {"replay_capacity", t.replay_capacity},
          {"batch_size", t.batch_size},
          {"discount", t.discount},
          {"target_sync_interval", t.target_sync_interval},
          {"epsilon_floor", t.epsilon_floor},
          {"epsilon_decay", t.epsilon_decay},
          {"learning_rate", t.learning_rate},
          {"warmup_steps", t.warmup_steps},
          {"network",
           {{"hidden", t.network.hidden},
            {"recurrent_layers", t.network.recurrent_layers},
            {"dense_hidden", t.network.dense_hidden}}}}},
        {"output_dir", output_dir},
        {"seed", seed},
    };
}

void ToolkitConfig::set_reward_preset(const std::string& preset)
{
    weights = RewardWeights::preset(preset);
    reward_preset = preset;
}

void ToolkitConfig::merge(const json& doc)
{
    std::map<std::string, FieldSetter> restriction_fields;
    for (Restriction r : kAllRestrictions) {
        restriction_fields[std::string(name(r))] = [this, r](const json& v, const std::string& p) {
            apply_object(v, p,
                         {{"beta_multiplier", number(effects[r].beta_multiplier)},
                          {"zeta", number(effects[r].zeta)}});
        };
    }

    auto& t = train;
    apply_object(
        doc, "",
        {{"disease",
          [this](const json& v, const std::string& p) {
              apply_object(v, p,
                           {{"N", number(disease.N)},
                            {"beta", number(disease.beta)},
                            {"sigma", number(disease.sigma)},
                            {"gamma", number(disease.gamma)},
                            {"mu", number(disease.mu)}});
          }},
         {"restrictions",
          [&](const json& v, const std::string& p) { apply_object(v, p, restriction_fields); }},
         {"reward",
          [this](const json& v, const std::string& p) {
              if (!v.is_object())
                  throw ConfigInvalid("config key '" + p + "' must be an object");
              // preset first so explicit weights refine it
              if (v.contains("preset")) {
                  if (!v["preset"].is_string())
                      throw ConfigInvalid("config key '" + p + ".preset' must be a string");
                  set_reward_preset(v["preset"].get<std::string>());
              }
              apply_object(v, p,
                           {{"preset", [](const json&, const std::string&) {}},
                            {"r", number(weights.r)},
                            {"s", number(weights.s)}});
          }},
         {"environment",
          [this](const json& v, const std::string& p) {
              apply_object(v, p,
                           {{"initial_infected_fraction", number(initial_infected_fraction)},
                            {"max_days", number(sim.max_days)},
                            {"termination_threshold", number(sim.termination_threshold)}});
          }},
         {"training",
          [&t](const json& v, const std::string& p) {
              apply_object(
                  v, p,
                  {{"episodes", number(t.episodes)},
                   {"replay_capacity", number(t.replay_capacity)},
                   {"batch_size", number(t.batch_size)},
                   {"discount", number(t.discount)},
                   {"target_sync_interval", number(t.target_sync_interval)},
                   {"epsilon_floor", number(t.epsilon_floor)},
                   {"epsilon_decay", number(t.epsilon_decay)},
                   {"learning_rate", number(t.learning_rate)},
                   {"warmup_steps", number(t.warmup_steps)},
                   {"network", [&t](const json& nv, const std::string& np) {
                        apply_object(
                            nv, np,
                            {{"hidden", number(t.network.hidden)},
                             {"recurrent_layers", number(t.network.recurrent_layers)},
                             {"dense_hidden", [&t](const json& dv, const std::string& dp) {
                                  if (!dv.is_array())
                                      throw ConfigInvalid("config key '" + dp +
                                                          "' must be an array of integers");
                                  t.network.dense_hidden.clear();
                                  for (const auto& w : dv) {
                                      if (!w.is_number_integer() || w.get<std::int64_t>() <= 0)
                                          throw ConfigInvalid("config key '" + dp +
                                                              "' must hold positive integers");
                                      t.network.dense_hidden.push_back(w.get<std::size_t>());
                                  }
                              }}});
                    }}});
          }},
         {"output_dir", text(output_dir)},
         {"seed", number(seed)}});
}

ToolkitConfig ToolkitConfig::from_json(const json& doc)
{
    ToolkitConfig cfg;
    cfg.merge(doc);
    cfg.validate();
    return cfg;
}

ToolkitConfig ToolkitConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(doc);
}

} // namespace epictrl
