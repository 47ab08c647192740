#include "shortmem/shortmem.h"

#include "shortmem/config.hpp"
#include "shortmem/dispatch.hpp"
#include "shortmem/error.hpp"
#include "shortmem/exact_gaussian.hpp"
#include "shortmem/linproc.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct sm_coeffs {
    shortmem::CoefficientSequence value;
};
struct sm_model {
    shortmem::InnovationModel value;
};
struct sm_path {
    shortmem::ProcessPath value;
};
struct sm_grid {
    shortmem::BrownianGrid value;
};
struct sm_config {
    shortmem::SimConfig value;
};

namespace {

thread_local std::string last_error;

sm_status status_of(shortmem::Errc code)
{
    return static_cast<sm_status>(static_cast<int>(code));
}

template <class F>
sm_status guarded(F&& body)
{
    try {
        body();
        last_error.clear();
        return SM_OK;
    } catch (const shortmem::Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return SM_ERR_CAPACITY;
    } catch (const std::exception& e) {
        last_error = e.what();
        return SM_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return SM_ERR_INTERNAL;
    }
}

template <class... Ptrs>
void require(Ptrs... ptrs)
{
    if (((ptrs == nullptr) || ...))
        throw shortmem::Error(shortmem::Errc::invalid_argument, "null pointer argument");
}

}  // namespace

extern "C" {

const char* sm_last_error(void)
{
    return last_error.c_str();
}

const char* sm_status_name(sm_status status)
{
    if (status == SM_OK)
        return "ok";
    if (status == SM_ERR_INTERNAL)
        return "internal";
    if (status >= SM_ERR_INVALID_ARGUMENT && status <= SM_ERR_INVARIANT)
        return shortmem::errc_name(static_cast<shortmem::Errc>(status));
    return "unknown";
}

const char* sm_version(void)
{
    return "0.1.0";
}

sm_status sm_coeffs_create(const char* kind, double param, int64_t window, double eps_tail, sm_coeffs** out)
{
    return guarded([&] {
        require(kind, out);
        const std::string name(kind);
        if (name == "identity") {
            *out = new sm_coeffs{shortmem::CoefficientSequence::identity()};
            return;
        }
        const shortmem::DecayDescriptor desc{shortmem::decay_kind_from_name(name), param};
        if (desc.kind == shortmem::DecayKind::prop10_blocks) {
            if (param != static_cast<double>(static_cast<int>(param)))
                throw shortmem::Error(shortmem::Errc::invalid_argument, "r_max must be an integer");
            *out = new sm_coeffs{shortmem::build_prop10(static_cast<int>(param))};
            return;
        }
        const int64_t w = window >= 0 ? window : shortmem::CoefficientSequence::auto_window(desc, eps_tail);
        *out = new sm_coeffs{shortmem::CoefficientSequence::from_descriptor(desc, w)};
    });
}

sm_status sm_coeffs_finite(int64_t first_index, const double* values, size_t count, sm_coeffs** out)
{
    return guarded([&] {
        require(values, out);
        *out = new sm_coeffs{shortmem::CoefficientSequence::finite(first_index, std::vector<double>(values, values + count))};
    });
}

void sm_coeffs_free(sm_coeffs* coeffs)
{
    delete coeffs;
}

sm_status sm_coeffs_window(const sm_coeffs* coeffs, int64_t* lo, int64_t* hi)
{
    return guarded([&] {
        require(coeffs, lo, hi);
        *lo = coeffs->value.lo();
        *hi = coeffs->value.hi();
    });
}

sm_status sm_coeffs_at(const sm_coeffs* coeffs, int64_t j, double* out)
{
    return guarded([&] {
        require(coeffs, out);
        *out = coeffs->value[j];
    });
}

sm_status sm_coeffs_total(const sm_coeffs* coeffs, double* out)
{
    return guarded([&] {
        require(coeffs, out);
        *out = shortmem::total_sum(coeffs->value).value;
    });
}

sm_status sm_coeffs_tail_mass(const sm_coeffs* coeffs, int64_t m, double* out)
{
    return guarded([&] {
        require(coeffs, out);
        *out = shortmem::tail_mass(coeffs->value, m);
    });
}

sm_status sm_model_create(const char* kind, double param, uint64_t seed, int64_t n, sm_model** out)
{
    return guarded([&] {
        require(kind, out);
        const shortmem::InnovationDescriptor desc{shortmem::innovation_kind_from_name(kind), param};
        *out = new sm_model{shortmem::InnovationModel(desc, seed, n)};
    });
}

void sm_model_free(sm_model* model)
{
    delete model;
}

sm_status sm_model_sample(const sm_model* model, int64_t first, int64_t last, double* out)
{
    return guarded([&] {
        require(model, out);
        const auto values = shortmem::sample_stream(model->value, first, last);
        std::memcpy(out, values.data(), values.size() * sizeof(double));
    });
}

sm_status sm_model_variance(const sm_model* model, double* out)
{
    return guarded([&] {
        require(model, out);
        *out = model->value.variance();
    });
}

uint64_t sm_derive_seed(uint64_t master, uint64_t a, uint64_t b)
{
    return shortmem::derive_seed(master, a, b);
}

sm_status sm_grid_create(uint64_t seed, int64_t n, sm_grid** out)
{
    return guarded([&] {
        require(out);
        *out = new sm_grid{shortmem::brownian_grid(seed, n)};
    });
}

void sm_grid_free(sm_grid* grid)
{
    delete grid;
}

sm_status sm_grid_values(const sm_grid* grid, const double** values, size_t* count)
{
    return guarded([&] {
        require(grid, values, count);
        *values = grid->value.w.data();
        *count = grid->value.w.size();
    });
}

sm_status sm_filter(const sm_coeffs* coeffs, const sm_model* model, int64_t n, double eps_tail, double b_n,
                    sm_path** out)
{
    return guarded([&] {
        require(coeffs, model, out);
        shortmem::FilterOptions opts;
        opts.eps_tail = eps_tail;
        if (b_n > 0.0)
            opts.b_n = b_n;
        *out = new sm_path{shortmem::filter(coeffs->value, model->value, n, opts)};
    });
}

void sm_path_free(sm_path* path)
{
    delete path;
}

sm_status sm_path_partial_sums(const sm_path* path, const double** values, size_t* count)
{
    return guarded([&] {
        require(path, values, count);
        *values = path->value.partial.data();
        *count = path->value.partial.size();
    });
}

sm_status sm_path_coupling(const sm_path* path, double total, double* out)
{
    return guarded([&] {
        require(path, out);
        *out = shortmem::coupling_stat(path->value, total);
    });
}

sm_status sm_path_sup_bm(const sm_path* path, double total, const sm_grid* grid, double* out)
{
    return guarded([&] {
        require(path, grid, out);
        *out = shortmem::sup_bm_distance(path->value, total, grid->value);
    });
}

sm_status sm_exact_variance(const sm_coeffs* coeffs, int64_t n, double sigma2, double* out)
{
    return guarded([&] {
        require(coeffs, out);
        *out = shortmem::exact_variance(coeffs->value, n, sigma2);
    });
}

sm_status sm_config_parse(const char* text, sm_config** out)
{
    return guarded([&] {
        require(text, out);
        *out = new sm_config{shortmem::parse_config(text)};
    });
}

sm_status sm_config_load(const char* path, sm_config** out)
{
    return guarded([&] {
        require(path, out);
        *out = new sm_config{shortmem::load_config(path)};
    });
}

void sm_config_free(sm_config* config)
{
    delete config;
}

sm_status sm_config_set_out_dir(sm_config* config, const char* dir)
{
    return guarded([&] {
        require(config, dir);
        if (*dir == '\0')
            throw shortmem::Error(shortmem::Errc::validation, "out_dir: must not be empty");
        config->value.out_dir = dir;
    });
}

sm_status sm_config_format(const sm_config* config, char** out)
{
    return guarded([&] {
        require(config, out);
        const std::string text = shortmem::format_config(config->value);
        char* buf = static_cast<char*>(std::malloc(text.size() + 1));
        if (buf == nullptr)
            throw std::bad_alloc();
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out = buf;
    });
}

void sm_string_free(char* text)
{
    std::free(text);
}

sm_status sm_dispatch(const char* command, const sm_config* config, int workers)
{
    return guarded([&] {
        require(command, config);
        shortmem::dispatch(command, config->value, workers);
    });
}

}  // extern "C"
