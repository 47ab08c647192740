// Command-line front end; talks to the library only through the C API.

#include "shortmem/shortmem.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <string>

namespace {

const char* const kCommands[] = {"simulate", "couple", "counterexample", "variance", "weighted", "coboundary",
                                 "diagnose"};

int report_failure(sm_status status)
{
    const nlohmann::json err = {{"error",
                                 {{"code", static_cast<int>(status)},
                                  {"status", sm_status_name(status)},
                                  {"message", sm_last_error()}}}};
    std::cerr << err.dump() << '\n';
    return static_cast<int>(status);
}

int run(const std::string& command, const std::string& config_path, const std::string& out_dir, int workers)
{
    sm_config* config = nullptr;
    sm_status st = sm_config_load(config_path.c_str(), &config);
    if (st != SM_OK)
        return report_failure(st);
    if (!out_dir.empty())
        st = sm_config_set_out_dir(config, out_dir.c_str());
    if (st == SM_OK)
        st = sm_dispatch(command.c_str(), config, workers);
    sm_config_free(config);
    return st == SM_OK ? 0 : report_failure(st);
}

int print_config(const std::string& config_path)
{
    sm_config* config = nullptr;
    sm_status st = sm_config_load(config_path.c_str(), &config);
    if (st != SM_OK)
        return report_failure(st);
    char* text = nullptr;
    st = sm_config_format(config, &text);
    sm_config_free(config);
    if (st != SM_OK)
        return report_failure(st);
    std::cout << text;
    sm_string_free(text);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte Carlo and exact-variance experiments for linear processes with short memory"};
    app.set_version_flag("--version", std::string(sm_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int workers = 1;
    for (const char* name : kCommands) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("-c,--config", config_path, "config file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out_dir, "output directory (overrides out_dir)");
        sub->add_option("-j,--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    }
    CLI::App* check = app.add_subcommand("check-config", "validate a config and print its canonical form");
    check->add_option("-c,--config", config_path, "config file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen == check)
        return print_config(config_path);
    return run(chosen->get_name(), config_path, out_dir, workers);
}
