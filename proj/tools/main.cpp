// ecgauth: ECG biometric authentication over RR-interval DCT features.
// Subcommands: enroll, verify, identify, serve, node, eval, dct.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecgauth/authflow.hpp"
#include "ecgauth/errors.hpp"
#include "ecgauth/eval.hpp"
#include "ecgauth/node.hpp"
#include "ecgauth/server.hpp"
#include "ecgauth/store.hpp"

namespace {

using namespace ecgauth;

constexpr int kExitAccepted = 0;
constexpr int kExitRejected = 10;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNet = 4;

int exit_code_for(const Error& e) {
    switch (e.code()) {
    case Errc::connection_failed:
    case Errc::protocol_error:
    case Errc::bad_magic:
    case Errc::bad_version:
    case Errc::crc_mismatch:
    case Errc::unknown_type:
    case Errc::malformed_payload:
    case Errc::payload_too_large:
        return kExitNet;
    default:
        return kExitIo;
    }
}

EcgRecord load_record(const std::filesystem::path& path, double fs_hz) {
    const std::string ext = path.extension().string();
    if (ext == ".hea")
        return read_wfdb(path);
    return read_csv(path, fs_hz);
}

void print_decision(const AuthDecision& d) {
    int i = 1;
    for (const IntervalScore& s : d.scores) {
        std::printf("interval %d t_ms=%.0f cf=%.6f passed=%s\n", i++, s.t_signal_ms, s.cf,
                    s.passed ? "yes" : "no");
    }
    const char* reason = d.reason == RejectReason::timeout    ? " reason=timeout"
                         : d.reason == RejectReason::exhausted ? " reason=exhausted"
                                                               : "";
    std::printf("decision %s%s elapsed_ms=%.0f\n", session_state_name(d.state),
                d.state == SessionState::rejected ? reason : "", d.elapsed_signal_ms);
}

volatile std::sig_atomic_t g_stop = 0;
void handle_signal(int) { g_stop = 1; }

int run(int argc, char** argv) {
    CLI::App app{"ECG biometric authentication (RR-interval DCT features)"};
    app.require_subcommand(1);

    std::string record_path;
    std::string subject;
    std::string db_path;
    std::string listen_addr;
    std::string server_addr;
    std::string mode_str;
    std::string records_list;
    std::string out_path;
    std::string fixture;
    std::string csv_path;
    double fs_hz = 360.0;
    double threshold = pipeline::kDefaultThreshold;
    std::uint32_t budget_ms = pipeline::kDefaultBudgetMs;
    bool force = false;
    std::vector<double> thresholds{0.90, 0.95};

    auto* c_enroll = app.add_subcommand("enroll", "Enroll a subject's first RR interval");
    c_enroll->add_option("--record", record_path, "ECG record (.hea or .csv)")->required();
    c_enroll->add_option("--subject", subject, "Subject id")->required();
    c_enroll->add_option("--db", db_path, "Template store path")->required();
    c_enroll->add_option("--fs", fs_hz, "Sampling rate for CSV records");
    c_enroll->add_flag("--force", force, "Replace an existing enrollment");

    auto* c_verify = app.add_subcommand("verify", "Verify a record against a claimed identity");
    c_verify->add_option("--record", record_path)->required();
    c_verify->add_option("--subject", subject)->required();
    c_verify->add_option("--db", db_path)->required();
    c_verify->add_option("--fs", fs_hz);
    c_verify->add_option("--threshold", threshold);
    c_verify->add_option("--budget-ms", budget_ms);

    auto* c_identify = app.add_subcommand("identify", "Match a record against every enrollment");
    c_identify->add_option("--record", record_path)->required();
    c_identify->add_option("--db", db_path)->required();
    c_identify->add_option("--fs", fs_hz);
    c_identify->add_option("--threshold", threshold);
    c_identify->add_option("--budget-ms", budget_ms);

    auto* c_serve = app.add_subcommand("serve", "Run the verification server");
    c_serve->add_option("--listen", listen_addr, "host:port")->required();
    c_serve->add_option("--db", db_path)->required();
    c_serve->add_option("--threshold", threshold);
    c_serve->add_option("--budget-ms", budget_ms);

    auto* c_node = app.add_subcommand("node", "Run the acquisition node against a server");
    c_node->add_option("--record", record_path)->required();
    c_node->add_option("--server", server_addr, "host:port")->required();
    c_node->add_option("--subject", subject)->required();
    c_node->add_option("--mode", mode_str, "enroll or auth")
        ->required()
        ->check(CLI::IsMember({"enroll", "auth"}));
    c_node->add_option("--fs", fs_hz);

    auto* c_eval = app.add_subcommand("eval", "Run genuine/impostor trials and write a report");
    c_eval->add_option("--records", records_list, "File with one record path per line");
    c_eval->add_option("--out", out_path, "Report CSV path")->required();
    c_eval->add_option("--thresholds", thresholds, "Decision thresholds")->delimiter(',');
    c_eval->add_option("--fixture", fixture, "Bundled fixture name (table1)");
    c_eval->add_option("--fs", fs_hz);

    auto* c_dct = app.add_subcommand("dct", "Dump the first RR interval's coefficients");
    c_dct->add_option("--csv", csv_path)->required();
    c_dct->add_option("--fs", fs_hz)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    if (c_enroll->parsed()) {
        TemplateStore store(db_path);
        const EcgRecord rec = load_record(record_path, fs_hz);
        store.put(enroll(rec, subject), force);
        std::printf("enrolled %s from %s\n", subject.c_str(), rec.record_id.c_str());
        return kExitAccepted;
    }

    if (c_verify->parsed()) {
        TemplateStore store(db_path);
        const auto tmpl = store.get(subject);
        if (!tmpl)
            throw Error(Errc::invalid_argument, "unknown subject");
        const EcgRecord rec = load_record(record_path, fs_hz);
        const AuthDecision d = verify(rec, *tmpl, threshold, budget_ms);
        print_decision(d);
        return d.state == SessionState::accepted ? kExitAccepted : kExitRejected;
    }

    if (c_identify->parsed()) {
        TemplateStore store(db_path);
        const EcgRecord rec = load_record(record_path, fs_hz);
        const auto match = identify(rec, store.all(), threshold, budget_ms);
        if (!match) {
            std::printf("NONE\n");
            return kExitRejected;
        }
        std::printf("%s\n", match->first.c_str());
        return kExitAccepted;
    }

    if (c_serve->parsed()) {
        TemplateStore store(db_path);
        Server server(net::parse_endpoint(listen_addr), store, threshold, budget_ms);
        server.start();
        std::printf("listening on %s (templates: %zu)\n", listen_addr.c_str(), store.size());
        std::fflush(stdout);
        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        while (!g_stop)
            ::pause();
        server.stop();
        return kExitAccepted;
    }

    if (c_node->parsed()) {
        const EcgRecord rec = load_record(record_path, fs_hz);
        const NodeMode mode = mode_str == "enroll" ? NodeMode::enroll : NodeMode::auth;
        const NodeOutcome outcome = node_run(rec, net::parse_endpoint(server_addr), subject, mode);
        if (outcome.remote_error) {
            const auto& re = *outcome.remote_error;
            std::cerr << "error: " << re.message << " (server code " << re.code << ")\n";
            return re.code == proto::wire_unknown_subject ||
                           re.code == proto::wire_duplicate_subject
                       ? kExitIo
                       : kExitNet;
        }
        if (mode == NodeMode::enroll) {
            std::printf("enrolled %s\n", subject.c_str());
            return kExitAccepted;
        }
        for (std::size_t i = 0; i < outcome.statuses.size(); ++i) {
            const auto& st = outcome.statuses[i];
            if (st.has_cf)
                std::printf("interval %zu cf=%.6f window=%u\n", i + 1, st.cf, st.window_fill);
        }
        std::printf("decision %s\n",
                    session_state_name(outcome.state));
        return outcome.state == SessionState::accepted ? kExitAccepted : kExitRejected;
    }

    if (c_eval->parsed()) {
        std::vector<eval::TrialResult> trials;
        if (fixture == "table1") {
            trials = eval::table1_fixture();
        } else if (!fixture.empty()) {
            throw Error(Errc::invalid_argument, "unknown fixture: " + fixture);
        } else {
            if (records_list.empty())
                throw Error(Errc::invalid_argument, "eval needs --records or --fixture");
            std::ifstream in(records_list);
            if (!in)
                throw Error(Errc::io_error, "cannot open records list: " + records_list);
            std::vector<EcgRecord> records;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#')
                    continue;
                records.push_back(load_record(line, fs_hz));
            }
            const eval::TrialRun genuine = eval::run_genuine_trials(records);
            const eval::TrialRun impostor = eval::run_impostor_trials(records);
            for (const auto& s : genuine.skipped)
                std::fprintf(stderr, "skipped %s: %s\n", s.record_id.c_str(), s.reason.c_str());
            trials = genuine.trials;
            trials.insert(trials.end(), impostor.trials.begin(), impostor.trials.end());
        }
        eval::report(trials, thresholds, out_path);
        // Summary echo for operators; the CSV stays the contract.
        std::vector<eval::TrialResult> genuine_only;
        for (const auto& t : trials)
            if (t.kind == eval::TrialKind::genuine)
                genuine_only.push_back(t);
        for (double thr : thresholds)
            std::printf("threshold=%g accuracy=%.6f\n", thr,
                        eval::accuracy(genuine_only, thr));
        std::printf("report written to %s\n", out_path.c_str());
        return kExitAccepted;
    }

    if (c_dct->parsed()) {
        const EcgRecord rec = read_csv(csv_path, fs_hz);
        const std::vector<TimedFeature> probes = pipeline_features(rec);
        for (double c : probes.front().features.coeffs)
            std::printf("%.17g\n", c);
        return kExitAccepted;
    }

    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
