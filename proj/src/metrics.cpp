#include "epictrl/metrics.hpp"

#include <algorithm>

namespace epictrl {

namespace {

template <typename Pred>
std::optional<int> first_day(const Trajectory& traj, Pred pred)
{
    for (const auto& rec : traj.days)
        if (pred(rec.state))
            return rec.day;
    return std::nullopt;
}

} // namespace

std::optional<int> crossing_day_cumulative(const Trajectory& traj, double N, double fraction)
{
    return first_day(traj, [&](const Compartments& c) { return c.ever_infected() >= fraction * N; });
}

std::optional<int> crossing_day_current(const Trajectory& traj, double N, double fraction)
{
    return first_day(traj, [&](const Compartments& c) { return c.i >= fraction * N; });
}

TrajectorySummary summarize(const Trajectory& traj, double N)
{
    TrajectorySummary s;
    if (traj.days.empty())
        return s;
    s.crossing_cumulative = crossing_day_cumulative(traj, N);
    s.crossing_current = crossing_day_current(traj, N);

    double econ_sum = 0.0;
    double reward_sum = 0.0;
    int reward_count = 0;
    for (const auto& rec : traj.days) {
        econ_sum += rec.economy / N;
        if (rec.reward) {
            reward_sum += *rec.reward;
            s.reward_peak = std::max(s.reward_peak.value_or(*rec.reward), *rec.reward);
            ++reward_count;
        }
    }
    s.mean_economy_norm = econ_sum / static_cast<double>(traj.days.size());
    s.final_economy_norm = traj.back().economy / N;
    s.total_deaths = traj.back().state.d;
    s.length_days = static_cast<int>(traj.days.size()) - 1;
    if (reward_count > 0) {
        s.reward_total = reward_sum;
        s.reward_mean = reward_sum / reward_count;
    }

    if (s.crossing_cumulative) {
        const auto idx = static_cast<std::size_t>(*s.crossing_cumulative);
        s.economy_at_crossing = traj.days[idx].economy / N;
        double sum = 0.0;
        for (std::size_t k = 0; k <= idx; ++k)
            sum += traj.days[k].economy / N;
        s.mean_economy_to_crossing = sum / static_cast<double>(idx + 1);
    }
    return s;
}

} // namespace epictrl
