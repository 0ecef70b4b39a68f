#include "etesc/csv_io.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace etesc {

std::string format_number(double v) {
    return fmt::format("{:.12g}", v);
}

void write_text_file(const std::string& path, const std::string& content) {
    write_file(path, [&](std::ostream& out) { out << content; });
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    const int n = traj.dim();
    std::string header = "t";
    for (const char* name : {"theta_hat", "theta"}) {
        for (int i = 0; i < n; ++i) {
            header += fmt::format(",{}_{}", name, i);
        }
    }
    header += ",y";
    for (const char* name : {"g_hat", "g_held", "u"}) {
        for (int i = 0; i < n; ++i) {
            header += fmt::format(",{}_{}", name, i);
        }
    }
    header += ",xi,upsilon";
    if (traj.average()) {
        header += ",v_av";
    }
    out << header << '\n';

    fmt::memory_buffer buf;
    auto put_vec = [&](const Eigen::Map<const Eigen::VectorXd>& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            fmt::format_to(std::back_inserter(buf), ",{:.12g}", v(i));
        }
    };
    for (std::size_t r = 0; r < traj.size(); ++r) {
        buf.clear();
        fmt::format_to(std::back_inserter(buf), "{:.12g}", traj.t(r));
        put_vec(traj.theta_hat(r));
        put_vec(traj.theta(r));
        fmt::format_to(std::back_inserter(buf), ",{:.12g}", traj.y(r));
        put_vec(traj.g_hat(r));
        put_vec(traj.g_held(r));
        put_vec(traj.u(r));
        fmt::format_to(std::back_inserter(buf), ",{:.12g},{:.12g}", traj.xi(r), traj.upsilon(r));
        if (traj.average()) {
            fmt::format_to(std::back_inserter(buf), ",{:.12g}", traj.v_av(r));
        }
        buf.push_back('\n');
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
}

void write_event_csv(std::ostream& out, const EventLog& events) {
    out << "k,t_k,interval,xi_at_fire,upsilon_at_fire\n";
    const auto& t = events.times();
    fmt::memory_buffer buf;
    for (std::size_t k = 0; k < events.size(); ++k) {
        buf.clear();
        const double interval = k == 0 ? 0.0 : t[k] - t[k - 1];
        fmt::format_to(std::back_inserter(buf), "{},{:.12g},{:.12g},{:.12g},{:.12g}\n", k, t[k], interval,
                       events.xi_at_fire()[k], events.upsilon_at_fire()[k]);
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
}

void write_stats_csv(std::ostream& out, const SweepResult& result) {
    out << "sigma,kind,n_intervals,mean,mean_deviation,variance,std_deviation,min_interval,tau_star_theory\n";
    for (const auto& row : result.rows) {
        const auto& s = row.stats;
        out << fmt::format("{:.12g},{},{},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n", row.sigma,
                           to_string(row.kind), s.count, s.mean, s.mean_deviation, s.variance,
                           s.standard_deviation, s.min_interval, row.tau_star_theory);
    }
}

}  // namespace etesc
