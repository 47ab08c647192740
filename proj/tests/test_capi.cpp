#include "shortmem/shortmem.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace {

template <class T, void (*Free)(T*)>
struct Owned {
    T* ptr = nullptr;
    ~Owned() { Free(ptr); }
};

using Coeffs = Owned<sm_coeffs, sm_coeffs_free>;
using Model = Owned<sm_model, sm_model_free>;
using Path = Owned<sm_path, sm_path_free>;
using Grid = Owned<sm_grid, sm_grid_free>;
using Config = Owned<sm_config, sm_config_free>;

}  // namespace

TEST(CApi, VersionAndStatusNames)
{
    EXPECT_STREQ(sm_version(), "0.1.0");
    EXPECT_STREQ(sm_status_name(SM_OK), "ok");
    EXPECT_STREQ(sm_status_name(SM_ERR_VALIDATION), "validation");
    EXPECT_STREQ(sm_status_name(SM_ERR_INTERNAL), "internal");
}

TEST(CApi, IdentityCouplingIsExactlyZero)
{
    Coeffs c;
    Model m;
    Path p;
    Grid g;
    ASSERT_EQ(sm_coeffs_create("identity", 0.0, -1, 1e-10, &c.ptr), SM_OK);
    ASSERT_EQ(sm_model_create("bm-coupled", 1.0, 99, 1000, &m.ptr), SM_OK);
    ASSERT_EQ(sm_filter(c.ptr, m.ptr, 1000, 1e-10, 0.0, &p.ptr), SM_OK);
    ASSERT_EQ(sm_grid_create(99, 1000, &g.ptr), SM_OK);
    double coupling = -1.0, sup_bm = -1.0;
    EXPECT_EQ(sm_path_coupling(p.ptr, 1.0, &coupling), SM_OK);
    EXPECT_EQ(sm_path_sup_bm(p.ptr, 1.0, g.ptr, &sup_bm), SM_OK);
    EXPECT_EQ(coupling, 0.0);
    EXPECT_EQ(sup_bm, 0.0);

    const double* w = nullptr;
    const double* s = nullptr;
    std::size_t nw = 0, ns = 0;
    ASSERT_EQ(sm_grid_values(g.ptr, &w, &nw), SM_OK);
    ASSERT_EQ(sm_path_partial_sums(p.ptr, &s, &ns), SM_OK);
    ASSERT_EQ(nw, 1001u);
    ASSERT_EQ(ns, 1001u);
    for (std::size_t j = 0; j < ns; ++j)
        ASSERT_EQ(s[j] / std::sqrt(1000.0), w[j]);
}

TEST(CApi, CoefficientQueries)
{
    Coeffs c;
    ASSERT_EQ(sm_coeffs_create("geometric", 0.5, -1, 1e-12, &c.ptr), SM_OK);
    std::int64_t lo = 0, hi = 0;
    ASSERT_EQ(sm_coeffs_window(c.ptr, &lo, &hi), SM_OK);
    EXPECT_EQ(lo, -hi);
    double total = 0.0, a1 = 0.0, tail = 0.0;
    EXPECT_EQ(sm_coeffs_total(c.ptr, &total), SM_OK);
    EXPECT_NEAR(total, 3.0, 1e-12);
    EXPECT_EQ(sm_coeffs_at(c.ptr, -1, &a1), SM_OK);
    EXPECT_EQ(a1, 0.5);
    EXPECT_EQ(sm_coeffs_tail_mass(c.ptr, 5, &tail), SM_OK);
    EXPECT_NEAR(tail, 0.0625, 1e-15);

    Coeffs f;
    const double values[] = {1.0, 1.0};
    ASSERT_EQ(sm_coeffs_finite(0, values, 2, &f.ptr), SM_OK);
    double var = 0.0;
    EXPECT_EQ(sm_exact_variance(f.ptr, 10, 1.0, &var), SM_OK);
    EXPECT_DOUBLE_EQ(var, 38.0);
}

TEST(CApi, ModelSamplingIsDeterministic)
{
    Model a, b;
    ASSERT_EQ(sm_model_create("gaussian", 2.0, 5, 0, &a.ptr), SM_OK);
    ASSERT_EQ(sm_model_create("gaussian", 2.0, 5, 0, &b.ptr), SM_OK);
    std::vector<double> x(21), y(21);
    ASSERT_EQ(sm_model_sample(a.ptr, -10, 10, x.data()), SM_OK);
    ASSERT_EQ(sm_model_sample(b.ptr, -10, 10, y.data()), SM_OK);
    EXPECT_EQ(x, y);
    double v = 0.0;
    EXPECT_EQ(sm_model_variance(a.ptr, &v), SM_OK);
    EXPECT_EQ(v, 4.0);
    EXPECT_EQ(sm_derive_seed(1, 2, 3), sm_derive_seed(1, 2, 3));
    EXPECT_NE(sm_derive_seed(1, 2, 3), sm_derive_seed(1, 2, 4));
}

TEST(CApi, ErrorsCarryStatusAndMessage)
{
    Coeffs c;
    EXPECT_EQ(sm_coeffs_create("geometric", 1.5, -1, 1e-10, &c.ptr), SM_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(c.ptr, nullptr);
    EXPECT_GT(std::strlen(sm_last_error()), 0u);
    EXPECT_EQ(sm_coeffs_create("hyperbolic", 0.5, -1, 1e-10, &c.ptr), SM_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(sm_coeffs_create("identity", 0.0, -1, 1e-10, nullptr), SM_ERR_INVALID_ARGUMENT);

    Model m;
    ASSERT_EQ(sm_model_create("bm-coupled", 1.0, 3, 10, &m.ptr), SM_OK);
    double out[3];
    EXPECT_EQ(sm_model_sample(m.ptr, 0, 2, out), SM_ERR_OUT_OF_RANGE);

    Coeffs id;
    ASSERT_EQ(sm_coeffs_create("identity", 0.0, -1, 1e-10, &id.ptr), SM_OK);
    EXPECT_STREQ(sm_last_error(), "");
    Path p;
    EXPECT_EQ(sm_filter(id.ptr, m.ptr, 20, 1e-10, 0.0, &p.ptr), SM_ERR_INVALID_ARGUMENT);
}

TEST(CApi, ConfigAndDispatch)
{
    Config cfg;
    EXPECT_EQ(sm_config_parse("seed = 1\ngrid = 16, 4\n", &cfg.ptr), SM_ERR_VALIDATION);
    EXPECT_EQ(sm_config_parse("seed = x\n", &cfg.ptr), SM_ERR_PARSE);
    EXPECT_EQ(sm_config_load("/nonexistent/run.cfg", &cfg.ptr), SM_ERR_IO);
    ASSERT_EQ(sm_config_parse("seed = 3\ngrid = 32, 64, 128\nreplicates = 3\n[model]\nkind = bm-coupled\n", &cfg.ptr),
              SM_OK);

    char* text = nullptr;
    ASSERT_EQ(sm_config_format(cfg.ptr, &text), SM_OK);
    EXPECT_NE(std::string(text).find("grid = 32, 64, 128"), std::string::npos);
    sm_string_free(text);

    const auto dir = std::filesystem::temp_directory_path() / "shortmem_test_capi";
    std::filesystem::remove_all(dir);
    ASSERT_EQ(sm_config_set_out_dir(cfg.ptr, dir.c_str()), SM_OK);
    EXPECT_EQ(sm_dispatch("couple", cfg.ptr, 2), SM_OK);
    EXPECT_TRUE(std::filesystem::exists(dir / "coupling.csv"));
    EXPECT_EQ(sm_dispatch("plot", cfg.ptr, 1), SM_ERR_INVALID_ARGUMENT);
}
