#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace epictrl {

struct DiseaseParams {
    double N = 1000.0;
    double beta = 0.12;
    double sigma = 1.0;
    double gamma = 1.0 / 27.0;
    double mu = 0.009;

    /// Throws ConfigInvalid when any field is nonpositive or N < 1.
    void validate() const;
};

struct Compartments {
    double s = 0.0;
    double e = 0.0;
    double i = 0.0;
    double r = 0.0;
    double d = 0.0;

    double total() const { return s + e + i + r + d; }
    /// Everyone who has ever been infectious: i + r + d.
    double ever_infected() const { return i + r + d; }

    bool operator==(const Compartments&) const = default;
};

struct Rates {
    double ds = 0.0;
    double de = 0.0;
    double di = 0.0;
    double dr = 0.0;
    double dd = 0.0;

    double sum() const { return ds + de + di + dr + dd; }
};

enum class Restriction : int {
    NoRestriction = 0,
    SocialDistancing = 1,
    Lockdown = 2,
    LockdownCurfew = 3,
};

inline constexpr std::size_t kRestrictionCount = 4;

inline constexpr std::array<Restriction, kRestrictionCount> kAllRestrictions = {
    Restriction::NoRestriction, Restriction::SocialDistancing, Restriction::Lockdown,
    Restriction::LockdownCurfew};

constexpr int code(Restriction r) { return static_cast<int>(r); }

/// Throws ConfigInvalid for codes outside 0..3.
Restriction restriction_from_code(int code);

std::string_view name(Restriction r);

struct RestrictionEffects {
    double beta_multiplier = 1.0;
    double zeta = 0.0;
};

/// Per-restriction effects, indexed by restriction code.
struct EffectsTable {
    std::array<RestrictionEffects, kRestrictionCount> entries;

    const RestrictionEffects& operator[](Restriction r) const { return entries[code(r)]; }
    RestrictionEffects& operator[](Restriction r) { return entries[code(r)]; }

    /// Uncalibrated transmission multipliers with the published economic factors.
    static EffectsTable defaults();

    /// Ranges and strict monotonicity in strictness; throws ConfigInvalid.
    void validate() const;
};

struct DayRecord {
    int day = 0;
    Compartments state;
    /// Restriction in force over the day that produced this state
    /// (NoRestriction on day 0).
    Restriction restriction = Restriction::NoRestriction;
    double economy = 0.0;
    std::optional<double> reward;
};

struct Trajectory {
    std::vector<DayRecord> days;

    std::size_t size() const { return days.size(); }
    const DayRecord& back() const { return days.back(); }
};

/// Right-hand side of the five SEIRD equations.
Rates derivatives(const Compartments& c, const DiseaseParams& p);

/// p with beta scaled by the restriction's transmission multiplier.
DiseaseParams effective_params(const DiseaseParams& p, const RestrictionEffects& eff);

// h = 1/32 day is exact in binary. Ten steps leave a few 1e-6 of error in E
// and I over the first day, when E rises from zero at rate ~sigma.
inline constexpr int kSubstepsPerDay = 32;

/// Advance exactly one day with fixed-step classical RK4.
///
/// Components that land in [-1e-9, 0) are clamped to zero and the residual is
/// moved into s so the population total is preserved. Anything non-finite or
/// below -1e-9 raises IntegrationDiverged.
Compartments integrate_day(const Compartments& c, const DiseaseParams& p,
                           const RestrictionEffects& eff);

struct SimulationSettings {
    int max_days = 1095;
    /// Episode ends once fewer than this many people are infected.
    double termination_threshold = 1.0;
};

using DayPolicy = std::function<Restriction(int day, const Compartments& state)>;

/// Iterate integrate_day from init, asking the policy for the restriction in
/// force on each day. Records day 0 and stops when i drops below the
/// termination threshold or max_days is reached. Rewards are left empty.
Trajectory simulate_policy(const Compartments& init, const DiseaseParams& p,
                           const EffectsTable& effects, const DayPolicy& policy,
                           const SimulationSettings& settings = {});

/// Outbreak seed: everyone susceptible except an infected fraction (7% by default).
Compartments initial_state(const DiseaseParams& p, double infected_fraction = 0.07);

} // namespace epictrl
