#include "wgmcqed/spectra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace wgmcqed {

double pm_to_ghz(double delta_pm, double lambda0) {
    if (lambda0 <= 0) throw std::domain_error("pm_to_ghz: lambda0 must be positive");
    return delta_pm * 1e-12 * constants::kSpeedOfLight / (lambda0 * lambda0) * 1e-9;
}

double ghz_to_pm(double delta_ghz, double lambda0) {
    if (lambda0 <= 0) throw std::domain_error("ghz_to_pm: lambda0 must be positive");
    return delta_ghz * 1e9 * lambda0 * lambda0 / constants::kSpeedOfLight * 1e12;
}

double angular_to_pm(double delta_rad_s, double lambda0) {
    return ghz_to_pm(delta_rad_s / kTwoPi / 1e9, lambda0);
}

double pm_to_angular(double delta_pm, double lambda0) {
    return pm_to_ghz(delta_pm, lambda0) * 1e9 * kTwoPi;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
    std::vector<double> out(n);
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) out[i] = lo + i * step;
    out.back() = hi;
    return out;
}

namespace {

void require_monotone(const std::vector<double>& grid, int min_points, const char* what) {
    if (static_cast<int>(grid.size()) < min_points) {
        throw std::invalid_argument(std::string(what) + ": grid needs at least " +
                                    std::to_string(min_points) + " points");
    }
    for (size_t i = 1; i < grid.size(); ++i) {
        if (grid[i] <= grid[i - 1]) {
            throw std::invalid_argument(std::string(what) + ": grid must be strictly ascending");
        }
    }
}

double topographic_prominence(const std::vector<double>& y, int idx) {
    const double h = y[idx];
    double left_floor = h;
    for (int j = idx - 1; j >= 0; --j) {
        if (y[j] > h) break;
        left_floor = std::min(left_floor, y[j]);
    }
    double right_floor = h;
    for (int j = idx + 1; j < static_cast<int>(y.size()); ++j) {
        if (y[j] > h) break;
        right_floor = std::min(right_floor, y[j]);
    }
    return h - std::max(left_floor, right_floor);
}

}  // namespace

PeakExtraction extract_peaks(const std::vector<double>& grid,
                             const std::vector<double>& values) {
    require_monotone(grid, 5, "extract_peaks");
    if (grid.size() != values.size()) {
        throw std::invalid_argument("extract_peaks: grid/value size mismatch");
    }
    PeakExtraction out;
    const int n = static_cast<int>(grid.size());
    std::vector<int> raw_indices;
    for (int i = 1; i + 1 < n; ++i) {
        if (values[i] > values[i - 1] && values[i] >= values[i + 1]) {
            const double denom = values[i - 1] - 2.0 * values[i] + values[i + 1];
            double delta = 0.0;
            if (std::abs(denom) > 0) {
                delta = 0.5 * (values[i - 1] - values[i + 1]) / denom;
                delta = std::clamp(delta, -0.5, 0.5);
            }
            const double h_local = 0.5 * (grid[i + 1] - grid[i - 1]);
            Peak p;
            p.position = grid[i] + delta * h_local;
            p.height = values[i] - 0.25 * (values[i - 1] - values[i + 1]) * delta;
            p.prominence = topographic_prominence(values, i);
            out.peaks.push_back(p);
            raw_indices.push_back(i);
        }
    }
    if (out.peaks.size() >= 2) {
        // Dominance ranked by prominence: shoulder bumps riding on a larger
        // structure do not displace genuine spectral lines.
        std::vector<int> order(out.peaks.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return out.peaks[a].prominence > out.peaks[b].prominence;
        });
        const Peak& p1 = out.peaks[order[0]];
        const Peak& p2 = out.peaks[order[1]];
        out.splitting = std::abs(p1.position - p2.position);
        out.dominant_positions = std::minmax(p1.position, p2.position);
    }
    return out;
}

std::optional<double> dip_fwhm(const std::vector<double>& grid,
                               const std::vector<double>& values) {
    require_monotone(grid, 5, "dip_fwhm");
    const int n = static_cast<int>(grid.size());
    int i_min = 0;
    double baseline = values[0];
    for (int i = 0; i < n; ++i) {
        if (values[i] < values[i_min]) i_min = i;
        baseline = std::max(baseline, values[i]);
    }
    if (i_min == 0 || i_min == n - 1) return std::nullopt;
    const double half = 0.5 * (baseline + values[i_min]);

    auto cross = [&](int from, int step) -> std::optional<double> {
        for (int i = from; i + step >= 0 && i + step < n; i += step) {
            const double y0 = values[i];
            const double y1 = values[i + step];
            if ((y0 - half) * (y1 - half) <= 0.0 && y0 != y1) {
                const double t = (half - y0) / (y1 - y0);
                return grid[i] + t * (grid[i + step] - grid[i]);
            }
        }
        return std::nullopt;
    };
    const auto left = cross(i_min, -1);
    const auto right = cross(i_min, +1);
    if (!left || !right) return std::nullopt;
    return *right - *left;
}

std::pair<double, double> transmission_reflection(const DensityMatrix& rho,
                                                  const SystemParams& params,
                                                  const DriveSpec& drive, Basis basis) {
    if (drive.flux <= 0) {
        throw std::invalid_argument("transmission_reflection: normalization needs flux > 0");
    }
    const auto [a_cw, a_ccw] = waveguide_mode_ops(rho.layout, basis);
    const double e_amp = drive.amplitude();
    const double out_coupling = std::sqrt(2.0 * params.kappa_e);
    const Complex t_amp = e_amp - out_coupling * expectation(rho, a_cw);
    const Complex r_amp = -out_coupling * expectation(rho, a_ccw);
    return {std::norm(t_amp) / drive.flux, std::norm(r_amp) / drive.flux};
}

namespace {

// Operators shared by every point of a sweep; immutable, so safe across the
// worker threads.
struct SweepContext {
    SystemParams params;
    SpaceLayout layout;
    Basis basis;
    double trunc_gate;
    std::vector<OperatorMatrix> collapses;
    OperatorMatrix a_cw, a_ccw;       // waveguide-facing amplitudes
    OperatorMatrix n_cw, n_ccw;       // photon numbers of the stored factors
    OperatorMatrix proj_exciton;

    SweepContext(const SystemParams& p, const SpaceLayout& l, Basis b, double gate)
        : params(p),
          layout(l),
          basis(b),
          trunc_gate(gate),
          collapses(build_collapse_ops(p, l)),
          a_cw(waveguide_mode_ops(l, b).first),
          a_ccw(waveguide_mode_ops(l, b).second),
          n_cw(embed(annihilation(l.n_fock), SpaceLayout::kSlotCw, l).adjoint() *
               embed(annihilation(l.n_fock), SpaceLayout::kSlotCw, l)),
          n_ccw(embed(annihilation(l.n_fock), SpaceLayout::kSlotCcw, l).adjoint() *
                embed(annihilation(l.n_fock), SpaceLayout::kSlotCcw, l)),
          proj_exciton(embed(lower_sigma(), SpaceLayout::kSlotEmitter, l).adjoint() *
                       embed(lower_sigma(), SpaceLayout::kSlotEmitter, l)) {}
};

SpectrumPoint solve_point(const SweepContext& ctx, const DriveSpec& drive,
                          SweepSolver& solver) {
    const OperatorMatrix h = build_hamiltonian(ctx.params, drive, ctx.layout, ctx.basis);
    const Liouvillian liou = assemble_liouvillian(h, ctx.collapses);
    const DensityMatrix rho = solver.solve(liou);

    SpectrumPoint pt;
    pt.laser_detuning = drive.laser_detuning;
    pt.exciton_detuning = drive.exciton_detuning;
    pt.cavity_exciton_detuning = drive.cavity_exciton_detuning();
    pt.flux = drive.flux;
    pt.power_w = power_from_photon_flux(drive.flux, ctx.params.lambda0);
    const auto [t, r] = transmission_reflection(rho, ctx.params, drive, ctx.basis);
    pt.transmission = t;
    pt.reflection = r;
    const double n_cw = expectation(rho, ctx.n_cw).real();
    const double n_ccw = expectation(rho, ctx.n_ccw).real();
    pt.n_cav_actual = n_cw + n_ccw;
    pt.exciton_population = expectation(rho, ctx.proj_exciton).real();
    const TruncationResidual tr = truncation_residual(rho);
    pt.trunc_cw = tr.mode_cw;
    pt.trunc_ccw = tr.mode_ccw;
    pt.trunc_flag = tr.max() > ctx.trunc_gate;

    // Steady-state photon bookkeeping, exact for the Lindblad model: the input
    // flux splits into the coherent T/R channels, intrinsic cavity loss,
    // exciton spontaneous emission, and incoherent re-emission into the
    // waveguide from the amplitude fluctuations of both modes.
    const Complex amp_cw = expectation(rho, ctx.a_cw);
    const Complex amp_ccw = expectation(rho, ctx.a_ccw);
    const double incoherent = 2.0 * ctx.params.kappa_e *
                              ((n_cw - std::norm(amp_cw)) + (n_ccw - std::norm(amp_ccw)));
    const double dissipated = 2.0 * ctx.params.kappa_i * (n_cw + n_ccw) +
                              ctx.params.gamma_par * pt.exciton_population;
    pt.power_balance_defect =
        std::abs(1.0 - t - r - (dissipated + incoherent) / drive.flux);
    return pt;
}

constexpr int kBlockSize = 16;

}  // namespace

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_blocks(int n_items, int block_size, int threads,
                     const std::function<void(int, int)>& run_block) {
    if (n_items <= 0) return;
    const int n_blocks = (n_items + block_size - 1) / block_size;
    const int n_workers = std::min(resolve_thread_count(threads), n_blocks);
    if (n_workers <= 1) {
        for (int b = 0; b < n_blocks; ++b) {
            run_block(b * block_size, std::min(n_items, (b + 1) * block_size));
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const int b = next.fetch_add(1);
            if (b >= n_blocks) return;
            try {
                run_block(b * block_size, std::min(n_items, (b + 1) * block_size));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

ScanLine scan_laser(const SystemParams& params, const DriveSpec& drive,
                    const std::vector<double>& laser_grid, const SweepSettings& settings) {
    require_monotone(laser_grid, 3, "scan_laser");
    params.validate();
    const SpaceLayout layout(settings.n_fock);
    const SweepContext ctx(params, layout, settings.basis, settings.trunc_gate);

    ScanLine line;
    line.drive = drive;
    line.laser_grid = laser_grid;
    line.points.resize(laser_grid.size());
    const int n = static_cast<int>(laser_grid.size());
    parallel_blocks(n, kBlockSize, settings.threads, [&](int first, int last) {
        SweepSolver solver(settings.steady);
        for (int i = first; i < last; ++i) {
            try {
                line.points[i] = solve_point(ctx, drive.at_laser_detuning(laser_grid[i]), solver);
            } catch (const std::exception& err) {
                throw std::runtime_error("scan_laser: point " + std::to_string(i) + " (" +
                                         std::to_string(laser_grid[i] / kTwoPi / 1e9) +
                                         " GHz): " + err.what());
            }
        }
    });
    return line;
}

namespace {

std::optional<double> straddle_gap(const PeakExtraction& px) {
    if (px.peaks.empty()) return std::nullopt;
    double max_height = 0.0;
    for (const Peak& p : px.peaks) max_height = std::max(max_height, p.height);
    const double floor = 0.05 * max_height;
    std::optional<double> left, right;
    for (const Peak& p : px.peaks) {
        if (p.prominence < floor) continue;
        if (p.position <= 0 && (!left || p.position > *left)) left = p.position;
        if (p.position >= 0 && (!right || p.position < *right)) right = p.position;
    }
    if (left && right) return *right - *left;
    return std::nullopt;
}

}  // namespace

CavityMap map_cavity_tuning(const SystemParams& params, const DriveSpec& drive,
                            const std::vector<double>& cavity_grid,
                            const std::vector<double>& laser_grid,
                            const SweepSettings& settings) {
    require_monotone(cavity_grid, 1, "map_cavity_tuning (cavity axis)");
    require_monotone(laser_grid, 5, "map_cavity_tuning (laser axis)");
    params.validate();
    const SpaceLayout layout(settings.n_fock);
    const SweepContext ctx(params, layout, settings.basis, settings.trunc_gate);

    CavityMap map;
    map.laser_grid = laser_grid;
    map.cavity_grid = cavity_grid;
    map.rows.resize(cavity_grid.size());
    const int n_la = static_cast<int>(laser_grid.size());
    const int n_ca = static_cast<int>(cavity_grid.size());
    const int total = n_la * n_ca;
    for (int r = 0; r < n_ca; ++r) {
        map.rows[r].cavity_detuning = cavity_grid[r];
        map.rows[r].points.resize(n_la);
    }

    // The laser axis is laser-QD detuning: Delta_al = grid value,
    // Delta_cl = Delta_al - Delta_ca per row.
    parallel_blocks(total, kBlockSize, settings.threads, [&](int first, int last) {
        SweepSolver solver(settings.steady);
        for (int k = first; k < last; ++k) {
            const int r = k / n_la;
            const int i = k % n_la;
            DriveSpec d = drive;
            d.exciton_detuning = laser_grid[i];
            d.laser_detuning = laser_grid[i] - cavity_grid[r];
            try {
                map.rows[r].points[i] = solve_point(ctx, d, solver);
            } catch (const std::exception& err) {
                throw std::runtime_error("map_cavity_tuning: row " + std::to_string(r) +
                                         " point " + std::to_string(i) + ": " + err.what());
            }
        }
    });

    for (int r = 0; r < n_ca; ++r) {
        MapRow& row = map.rows[r];
        std::vector<double> refl(n_la);
        for (int i = 0; i < n_la; ++i) refl[i] = row.points[i].reflection;
        row.reflection_peaks = extract_peaks(laser_grid, refl);
        row.peak_reflection = *std::max_element(refl.begin(), refl.end());
        row.exciton_straddle_gap = straddle_gap(row.reflection_peaks);
    }
    return map;
}

SaturationSweep power_sweep(const SystemParams& params, const DriveSpec& drive,
                            const std::vector<double>& powers_w,
                            const std::vector<double>& laser_grid,
                            const SweepSettings& settings) {
    require_monotone(powers_w, 1, "power_sweep (powers)");
    require_monotone(laser_grid, 5, "power_sweep (laser axis)");
    if (powers_w.front() <= 0) {
        throw std::invalid_argument("power_sweep: powers must be positive");
    }
    params.validate();
    const SpaceLayout layout(settings.n_fock);
    const SweepContext ctx(params, layout, settings.basis, settings.trunc_gate);

    SaturationSweep sweep;
    sweep.laser_grid = laser_grid;
    sweep.rows.resize(powers_w.size());
    const int n_la = static_cast<int>(laser_grid.size());
    const int n_p = static_cast<int>(powers_w.size());
    for (int r = 0; r < n_p; ++r) {
        sweep.rows[r].power_w = powers_w[r];
        sweep.rows[r].flux = photon_flux_from_power(powers_w[r], params.lambda0);
        sweep.rows[r].points.resize(n_la);
    }

    const int total = n_la * n_p;
    parallel_blocks(total, kBlockSize, settings.threads, [&](int first, int last) {
        SweepSolver solver(settings.steady);
        for (int k = first; k < last; ++k) {
            const int r = k / n_la;
            const int i = k % n_la;
            DriveSpec d = drive.at_laser_detuning(laser_grid[i]);
            d.flux = sweep.rows[r].flux;
            try {
                sweep.rows[r].points[i] = solve_point(ctx, d, solver);
            } catch (const std::exception& err) {
                throw std::runtime_error("power_sweep: power row " + std::to_string(r) +
                                         " point " + std::to_string(i) + ": " + err.what());
            }
        }
    });

    for (int r = 0; r < n_p; ++r) {
        SaturationRow& row = sweep.rows[r];
        DriveSpec nominal = drive;
        nominal.flux = row.flux;
        const BareCavityResult bare = bare_cavity_photon_number(params, nominal);
        row.n_cav_bare = bare.n_cav;
        row.p_dropped_w = bare.p_dropped;
        std::vector<double> refl(n_la);
        bool any_flag = false;
        double peak_r = 0.0;
        for (int i = 0; i < n_la; ++i) {
            refl[i] = row.points[i].reflection;
            any_flag = any_flag || row.points[i].trunc_flag;
            peak_r = std::max(peak_r, refl[i]);
        }
        row.trunc_flag = any_flag;
        row.peak_delta_r = peak_r;
        const PeakExtraction px = extract_peaks(laser_grid, refl);
        row.splitting = px.splitting;
        row.reflection_normalized.resize(n_la);
        for (int i = 0; i < n_la; ++i) {
            row.reflection_normalized[i] = peak_r > 0 ? refl[i] / peak_r : 0.0;
        }
    }
    return sweep;
}

}  // namespace wgmcqed
