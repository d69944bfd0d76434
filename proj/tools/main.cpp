// tspa: operator front-end for the authentication laboratory. Every
// subcommand is a thin adapter over the library; no protocol logic here.
#include <CLI11.hpp>

#include "tspa/lab.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <random>
#include <thread>

using namespace tspa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRejected = 3;
constexpr int kExitExhausted = 4;

std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop.store(true); }

struct Options {
    std::string key_file = "tspa.key";
    std::string card_file = "tspa.card";
    unsigned bits = 64;
    std::uint64_t toy_f = 0; // 0 = full hash mode
    bool permissive_kic = false;
    std::uint64_t delta_t = 60;
    std::string address;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string password;
    std::string scheme_name = "shen";
    std::string identity;
    std::string new_password;
    std::string attack_name;
    bool white_box = false;

    OneWayConfig f_config() const {
        if (toy_f > 0) return {FMode::toy, toy_f};
        return {};
    }
    IdPolicy id_policy() const {
        IdPolicy policy;
        policy.mode = permissive_kic ? IdMode::permissive : IdMode::strict;
        return policy;
    }
    Scheme scheme() const {
        return scheme_name == "improved" ? Scheme::improved : Scheme::shen;
    }
    std::uint64_t rng_seed() const {
        if (seed_given) return seed;
        return std::random_device{}();
    }
    std::string listen_address() const {
        if (!address.empty()) return address;
        if (const char* env = std::getenv("TSPA_ADDR")) return env;
        return "127.0.0.1:7541";
    }
};

std::string ask_password(const Options& opt, const std::string& prompt) {
    if (!opt.password.empty()) return opt.password;
    std::cerr << prompt << ": " << std::flush;
    std::string pw;
    std::getline(std::cin, pw);
    return pw;
}

ClockPolicy wall_clock_policy(const Options& opt) {
    return {opt.delta_t, 5, std::make_shared<SystemClock>()};
}

int cmd_kic_setup(const Options& opt) {
    Rng rng(opt.rng_seed());
    Kic kic = kic_setup(opt.bits, std::nullopt, opt.f_config(), opt.id_policy(), rng);
    save_key_file(opt.key_file, kic);
    std::cout << "key file " << opt.key_file << " written: n="
              << kic.params().n << " e=" << kic.params().e << " g="
              << kic.params().g << "\n";
    return kExitOk;
}

int cmd_kic_register(Options& opt) {
    Kic kic = load_key_file(opt.key_file);
    std::string pw = ask_password(opt, "password for " + opt.identity);
    SystemClock now;
    CardData card;
    try {
        card = kic.register_user(opt.identity, pw, now.now());
    } catch (const std::runtime_error& e) {
        std::cerr << "registration rejected: " << e.what() << "\n";
        return kExitRejected;
    }
    save_key_file(opt.key_file, kic);
    save_card_file(opt.card_file, card);
    std::cout << "registered " << opt.identity << " (id=" << card.id
              << "), card written to " << opt.card_file << "\n";
    return kExitOk;
}

int cmd_kic_renew(Options& opt) {
    Kic kic = load_key_file(opt.key_file);
    std::string old_pw = ask_password(opt, "current password for " + opt.identity);
    BigInt id = kic.derive_id(opt.identity);
    CardData card;
    try {
        card = kic.renew_password(id, old_pw, opt.new_password);
    } catch (const std::runtime_error& e) {
        std::cerr << "renewal rejected: " << e.what() << "\n";
        return kExitRejected;
    }
    save_key_file(opt.key_file, kic);
    save_card_file(opt.card_file, card);
    std::cout << "password renewed for " << opt.identity << ", card rewritten\n";
    return kExitOk;
}

int cmd_serve(const Options& opt) {
    Kic kic = load_key_file(opt.key_file);
    ServeOptions so;
    so.scheme = opt.scheme();
    so.clock = wall_clock_policy(opt);
    so.id = kic.id_policy();
    so.replay_cache = opt.scheme() == Scheme::improved;
    Service svc = serve(kic.params(), so, opt.listen_address());
    std::cout << "serving " << to_string(so.scheme) << " verifier on "
              << svc.address() << " (ctrl-c to stop)\n";
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop.load())
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    svc.stop();
    return kExitOk;
}

int cmd_login(Options& opt) {
    CardData card = load_card_file(opt.card_file);
    std::string pw = ask_password(opt, "password");
    Rng rng(opt.rng_seed());
    SessionOutcome out = client_session(card, pw, opt.listen_address(),
                                        opt.scheme(), wall_clock_policy(opt), rng);
    std::cout << "outcome=" << to_string(out.kind);
    if (out.kind == SessionOutcome::Kind::rejected)
        std::cout << " reject_code=" << int(out.reject_code);
    if (!out.detail.empty()) std::cout << " detail=\"" << out.detail << "\"";
    std::cout << "\n";
    switch (out.kind) {
        case SessionOutcome::Kind::server_authenticated: return kExitOk;
        case SessionOutcome::Kind::rejected: return kExitRejected;
        default: return kExitFailure;
    }
}

LabConfig lab_config(const Options& opt) {
    LabConfig cfg;
    cfg.bits = opt.bits;
    cfg.f_config = opt.f_config();
    cfg.id_mode = opt.permissive_kic ? IdMode::permissive : IdMode::strict;
    cfg.delta_t = opt.delta_t;
    cfg.seed = opt.rng_seed();
    return cfg;
}

int cmd_attack(const Options& opt) {
    AttackKind kind;
    if (opt.attack_name == "euclid") kind = AttackKind::euclid;
    else if (opt.attack_name == "scale") kind = AttackKind::scale;
    else if (opt.attack_name == "inverse-id") kind = AttackKind::inverse_id;
    else if (opt.attack_name == "unity") kind = AttackKind::unity;
    else {
        std::cerr << "unknown attack: " << opt.attack_name << "\n";
        return kExitUsage;
    }
    Lab lab(lab_config(opt));
    AttackReport rep = lab.run_attack(kind, opt.scheme(), opt.white_box);
    std::cout << format_report_line(rep) << "\n";
    switch (rep.outcome) {
        case AttackOutcome::accepted: return kExitOk;
        case AttackOutcome::search_exhausted: return kExitExhausted;
        default: return kExitRejected;
    }
}

int cmd_matrix(const Options& opt) {
    Lab lab(lab_config(opt));
    std::vector<AttackReport> reports = lab.run_matrix();
    for (const auto& r : reports) std::cout << format_report_line(r) << "\n";

    std::cout << "\nattack        shen        improved\n";
    for (std::size_t i = 0; i < reports.size(); i += 2) {
        std::printf("%-12s  %-10s  %-10s\n", to_string(reports[i].attack),
                    to_string(reports[i].outcome), to_string(reports[i + 1].outcome));
    }
    bool ok = matrix_matches_expectation(reports);
    std::cout << (ok ? "matrix matches the expected security table\n"
                     : "matrix DEVIATES from the expected security table\n");
    return ok ? kExitOk : kExitFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tspa: timestamp-based smart-card authentication laboratory"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--key-file", opt.key_file, "KIC key file path");
        cmd->add_option("--card-file", opt.card_file, "smart-card file path");
        cmd->add_option("--toy-f", opt.toy_f,
                        "use the small-range one-way function with bound B");
        cmd->add_flag("--permissive-kic", opt.permissive_kic,
                      "accept any integer identity in [2, n-2]");
        cmd->add_option("--delta-t", opt.delta_t, "timestamp window in seconds");
        cmd->add_option("--seed", opt.seed, "deterministic rng seed")
            ->each([&](const std::string&) { opt.seed_given = true; });
        cmd->add_option("--password", opt.password,
                        "password on the command line (insecure; for scripts)");
        cmd->add_option("--bits", opt.bits, "modulus size in bits");
        cmd->add_option("--address", opt.address,
                        "host:port (default TSPA_ADDR or 127.0.0.1:7541)");
        cmd->add_option("--scheme", opt.scheme_name, "shen or improved")
            ->check(CLI::IsMember({"shen", "improved"}));
    };

    CLI::App* kic = app.add_subcommand("kic", "key information center operations");
    kic->require_subcommand(1);
    CLI::App* setup = kic->add_subcommand("setup", "generate system parameters");
    add_common(setup);
    CLI::App* reg = kic->add_subcommand("register", "enroll a user, issue a card");
    reg->add_option("identity", opt.identity, "user identity")->required();
    add_common(reg);
    CLI::App* renew = kic->add_subcommand("renew", "change a user's password");
    renew->add_option("identity", opt.identity, "user identity")->required();
    renew->add_option("--new-password", opt.new_password, "replacement password")
        ->required();
    add_common(renew);

    CLI::App* serve_cmd = app.add_subcommand("serve", "run the loopback verifier");
    add_common(serve_cmd);
    CLI::App* login = app.add_subcommand("login", "authenticate with a card file");
    login->add_option("identity", opt.identity, "user identity (informational)");
    add_common(login);
    CLI::App* attack = app.add_subcommand("attack", "run one forgery attack in-process");
    attack->add_option("kind", opt.attack_name, "euclid|scale|inverse-id|unity")
        ->required();
    attack->add_flag("--white-box", opt.white_box,
                     "unity only: invert in the exponent group");
    add_common(attack);
    CLI::App* matrix = app.add_subcommand("matrix", "all four attacks vs both schemes");
    add_common(matrix);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (setup->parsed()) return cmd_kic_setup(opt);
        if (reg->parsed()) return cmd_kic_register(opt);
        if (renew->parsed()) return cmd_kic_renew(opt);
        if (serve_cmd->parsed()) return cmd_serve(opt);
        if (login->parsed()) return cmd_login(opt);
        if (attack->parsed()) return cmd_attack(opt);
        if (matrix->parsed()) return cmd_matrix(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
