#ifndef BSV_GRID_POSTERIOR_HPP
#define BSV_GRID_POSTERIOR_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <bsv/core.hpp>
#include <bsv/gp_surrogate.hpp>
#include <bsv/proposal_grid.hpp>

namespace bsv {

    /// Surrogate statistics over every grid point, in grid order.
    struct GridPrediction {
        std::vector<double> f;          ///< probability-space mean
        std::vector<double> sigma;      ///< logit-space posterior std
        std::vector<double> mean_logit; ///< logit-space posterior mean

        std::size_t size() const { return f.size(); }
    };

    namespace detail {

        /// Kernel values between one training input and one grid "line" (all
        /// coordinates fixed except the last). Lattice-aligned inputs read from a
        /// table indexed by the per-axis index offset; other inputs are evaluated
        /// directly.
        class GridKernelRows {
        public:
            GridKernelRows(const ProposalGrid& grid, const KernelParams& kernel, const std::optional<DesignSpace>& normalize_to)
                : _grid(&grid), _kernel(kernel)
            {
                const std::size_t d = grid.dim();
                _scale.assign(d, 1.0);
                if (normalize_to)
                    for (std::size_t k = 0; k < d; ++k)
                        _scale[k] = 1.0 / (normalize_to->upper[k] - normalize_to->lower[k]);
                // One mirrored line of length 2R-1 per offset of the leading axes,
                // so a lattice-aligned source reads its kernel line contiguously.
                const std::size_t len = line_length(), width = 2 * len - 1;
                _table.resize(line_count() * width);
                for (std::size_t line = 0; line < line_count(); ++line) {
                    double partial = 0.0;
                    for (std::size_t k = 0; k + 1 < d; ++k) {
                        double dk = static_cast<double>(grid.axis_index(line * len, k)) * grid.spacing(k) * _scale[k];
                        partial += dk * dk;
                    }
                    double* t = _table.data() + line * width;
                    for (std::size_t c = 0; c < len; ++c) {
                        double dk = static_cast<double>(c) * grid.spacing(d - 1) * _scale[d - 1];
                        double v = kernel.at_distance(std::sqrt(partial + dk * dk));
                        t[len - 1 + c] = v;
                        t[len - 1 - c] = v;
                    }
                }
            }

            std::size_t line_length() const { return _grid->resolution().back(); }
            std::size_t line_count() const { return _grid->size() / line_length(); }

            struct Source {
                std::optional<std::size_t> index; ///< grid index when lattice aligned
                std::vector<double> coords;       ///< kernel-space coordinates
            };

            Source source(const DesignPoint& x) const
            {
                Source s;
                s.index = _grid->index_of(x);
                s.coords.resize(_grid->dim());
                for (std::size_t k = 0; k < _grid->dim(); ++k)
                    s.coords[k] = x[k] * _scale[k];
                return s;
            }

            /// Kernel values k(source, g) along grid line `line`. Returns a pointer
            /// into the offset table for lattice-aligned sources, otherwise fills
            /// and returns `scratch`.
            const double* line(const Source& src, std::size_t line, std::span<double> scratch) const
            {
                const std::size_t d = _grid->dim();
                const std::size_t len = line_length();
                const std::size_t first = line * len;
                if (src.index) {
                    std::size_t base = 0;
                    for (std::size_t k = 0; k + 1 < d; ++k) {
                        std::size_t a = _grid->axis_index(*src.index, k), g = _grid->axis_index(first, k);
                        base += (a > g ? a - g : g - a) * _grid->strides()[k];
                    }
                    const std::size_t a = _grid->axis_index(*src.index, d - 1);
                    return _table.data() + (base / len) * (2 * len - 1) + (len - 1 - a);
                }
                double partial = 0.0;
                for (std::size_t k = 0; k + 1 < d; ++k) {
                    double diff = _grid->coordinate(first, k) * _scale[k] - src.coords[k];
                    partial += diff * diff;
                }
                const auto& last = _grid->axis(d - 1);
                const double sl = _scale[d - 1], xl = src.coords[d - 1];
                for (std::size_t c = 0; c < len; ++c) {
                    double diff = last[c] * sl - xl;
                    scratch[c] = _kernel.at_distance(std::sqrt(partial + diff * diff));
                }
                return scratch.data();
            }

        private:
            const ProposalGrid* _grid;
            KernelParams _kernel;
            std::vector<double> _scale;
            std::vector<double> _table;
        };

    } // namespace detail

    /// Posterior mean and variance of a GpSurrogate over a fixed grid, updated
    /// incrementally as the surrogate grows.
    ///
    /// With factor rows L and whitened targets w = L^{-1} z, the posterior at g is
    /// mean(g) = sum_i v_i(g) w_i and var(g) = s^2 - sum_i v_i(g)^2 where
    /// v = L^{-1} k_X(g). Appending an observation appends one entry to v and w
    /// without changing the earlier ones, so each update costs one pass over
    /// the existing inputs rather than a full re-solve.
    class GridPosterior {
    public:
        GridPosterior(const ProposalGrid& grid, const GpSurrogate& gp)
            : _grid(&grid), _rows(grid, gp.kernel(), gp.options().normalize_to), _link(gp.link()), _prior_var(gp.kernel().variance())
        {
            reset();
            update(gp);
        }

        std::size_t size() const { return _tracked; }
        std::span<const double> mean_logit() const { return _mean; }
        std::span<const double> variance() const { return _var; }

        /// Brings the grid statistics in line with gp. Incremental when gp extends
        /// the tracked data under the same factorization; otherwise rebuilt.
        void update(const GpSurrogate& gp)
        {
            if (gp.generation() != _generation || gp.size() < _tracked) {
                reset();
                _generation = gp.generation();
            }
            constexpr std::size_t max_batch = 32;
            while (_tracked < gp.size())
                add_rows(gp, std::min(gp.size(), _tracked + max_batch));
        }

        GridPrediction prediction() const
        {
            GridPrediction p;
            const std::size_t n = _mean.size();
            p.f.resize(n);
            p.sigma.resize(n);
            p.mean_logit = _mean;
            for (std::size_t i = 0; i < n; ++i) {
                p.f[i] = inverse_link(_link, _mean[i]);
                p.sigma[i] = std::sqrt(std::max(_var[i], 0.0));
            }
            return p;
        }

    private:
        void reset()
        {
            _mean.assign(_grid->size(), 0.0);
            _var.assign(_grid->size(), _prior_var);
            _sources.clear();
            _tracked = 0;
        }

        void add_rows(const GpSurrogate& gp, std::size_t upto)
        {
            const std::size_t n = _tracked;
            const std::size_t batch = upto - n;
            for (std::size_t m = n; m < upto; ++m)
                _sources.push_back(_rows.source(gp.inputs()[m]));

            // u_b = L_{0..m}^{-T} l_b for the new row m = n + b.
            std::vector<std::vector<double>> u(batch);
            std::vector<double> pivot(batch), wnew(batch);
            for (std::size_t b = 0; b < batch; ++b) {
                const std::size_t m = n + b;
                const double* row = gp.factor_row(m);
                u[b].assign(row, row + m);
                gp.backward_solve(u[b]);
                pivot[b] = row[m];
                wnew[b] = gp.whitened_targets()[m];
            }

            const std::size_t len = _rows.line_length();
            std::vector<double> krow(len);
            std::vector<double> acc(batch * len);
            std::vector<double> knew(batch * len);
            for (std::size_t line = 0; line < _rows.line_count(); ++line) {
                std::fill(acc.begin(), acc.end(), 0.0);
                for (std::size_t j = 0; j < n; ++j) {
                    const double* kv = _rows.line(_sources[j], line, krow);
                    if (batch == 3) {
                        const double c0 = u[0][j], c1 = u[1][j], c2 = u[2][j];
                        double* a0 = acc.data();
                        double* a1 = a0 + len;
                        double* a2 = a1 + len;
                        for (std::size_t c = 0; c < len; ++c) {
                            const double k = kv[c];
                            a0[c] += c0 * k;
                            a1[c] += c1 * k;
                            a2[c] += c2 * k;
                        }
                        continue;
                    }
                    for (std::size_t b = 0; b < batch; ++b) {
                        const double cb = u[b][j];
                        double* a = acc.data() + b * len;
                        for (std::size_t c = 0; c < len; ++c)
                            a[c] += cb * kv[c];
                    }
                }
                const std::size_t first = line * len;
                for (std::size_t b = 0; b < batch; ++b) {
                    double* kb = knew.data() + b * len;
                    const double* kn = _rows.line(_sources[n + b], line, std::span<double>(kb, len));
                    if (kn != kb)
                        std::copy(kn, kn + len, kb);
                    double* a = acc.data() + b * len;
                    for (std::size_t b2 = 0; b2 < b; ++b2) {
                        const double c = u[b][n + b2];
                        const double* k2 = knew.data() + b2 * len;
                        for (std::size_t c2 = 0; c2 < len; ++c2)
                            a[c2] += c * k2[c2];
                    }
                    const double inv = 1.0 / pivot[b];
                    for (std::size_t c2 = 0; c2 < len; ++c2) {
                        double v = (kb[c2] - a[c2]) * inv;
                        _mean[first + c2] += v * wnew[b];
                        _var[first + c2] -= v * v;
                    }
                }
            }
            _tracked = upto;
        }

        const ProposalGrid* _grid;
        detail::GridKernelRows _rows;
        LinkParams _link;
        double _prior_var;
        std::size_t _generation = 0;
        std::size_t _tracked = 0;
        std::vector<detail::GridKernelRows::Source> _sources;
        std::vector<double> _mean;
        std::vector<double> _var;
    };

    /// Full posterior over the grid for an arbitrary surrogate.
    inline GridPrediction predict_on_grid(const GpSurrogate& gp, const ProposalGrid& grid) { return GridPosterior(grid, gp).prediction(); }

    /// Posterior mean only, O(n) per grid point. Sigma is left empty.
    inline GridPrediction predict_mean_on_grid(const GpSurrogate& gp, const ProposalGrid& grid)
    {
        detail::GridKernelRows rows(grid, gp.kernel(), gp.options().normalize_to);
        GridPrediction p;
        p.mean_logit.assign(grid.size(), 0.0);
        const std::size_t len = rows.line_length();
        std::vector<double> krow(len);
        std::vector<detail::GridKernelRows::Source> sources;
        for (const auto& x : gp.inputs())
            sources.push_back(rows.source(x));
        for (std::size_t line = 0; line < rows.line_count(); ++line) {
            double* m = p.mean_logit.data() + line * len;
            for (std::size_t j = 0; j < sources.size(); ++j) {
                const double* kv = rows.line(sources[j], line, krow);
                const double a = gp.alpha()[j];
                for (std::size_t c = 0; c < len; ++c)
                    m[c] += a * kv[c];
            }
        }
        p.f.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            p.f[i] = inverse_link(gp.link(), p.mean_logit[i]);
        return p;
    }

} // namespace bsv

#endif
