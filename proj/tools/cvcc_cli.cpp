// Scenario-driven entry point for the CVCC stack: run simulations, query
// encrypted stores, emit registration fixtures and crypto test vectors.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cvcc/crypto_ops.hpp"
#include "cvcc/netsim.hpp"
#include "cvcc/protocol.hpp"
#include "cvcc/schnorr.hpp"
#include "cvcc/stream_cipher.hpp"
#include "cvcc/vc_store.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

int exit_code_for(const cvcc::Error& e) {
    switch (e.code()) {
        case cvcc::Errc::ParseError:
        case cvcc::Errc::ValidationError:
        case cvcc::Errc::ConfigInvalid:
        case cvcc::Errc::NotFound:
            return 2;
        default:
            return 3;
    }
}

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) cvcc::raise(cvcc::Errc::ParseError, "cannot write '" + path.string() + "'");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

int cmd_run(const std::string& scenario_path, uint64_t seed, const std::string& out_dir) {
    cvcc::sim::ScenarioConfig cfg = cvcc::sim::load_config(scenario_path);
    cvcc::sim::RunResult result = cvcc::sim::run_scenario(cfg, seed);

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "trace.txt", result.trace.to_text());
    write_file(fs::path(out_dir) / "report.json", result.report.to_json().dump(2) + "\n");
    if (cfg.store.dump && !result.store_file.empty()) {
        write_file(fs::path(out_dir) / "store.bin",
                   std::string(result.store_file.begin(), result.store_file.end()));
        ordered_json keys;
        for (const auto& [node, ok] : result.owner_keys)
            keys[node] = {{"data_key", cvcc::hex_encode(ok.data_key)},
                          {"search_key", cvcc::hex_encode(ok.search_key)}};
        write_file(fs::path(out_dir) / "owner-keys.json", keys.dump(2) + "\n");
    }
    return 0;
}

int cmd_search(const std::string& store_path, const std::string& key_hex,
               const std::string& keyword) {
    cvcc::Bytes key_raw = cvcc::hex_decode(key_hex);
    if (key_raw.size() != 32)
        cvcc::raise(cvcc::Errc::ParseError, "search key must be 32 bytes of hex");
    cvcc::Digest k_search{};
    std::copy(key_raw.begin(), key_raw.end(), k_search.begin());

    std::ifstream in(store_path, std::ios::binary);
    if (!in) cvcc::raise(cvcc::Errc::NotFound, "store file '" + store_path + "' not found");
    cvcc::store::StoreState st = cvcc::store::StoreState::deserialize(in);

    cvcc::store::SearchToken tok = cvcc::store::trapdoor(k_search, cvcc::to_bytes(keyword));
    for (const cvcc::Digest& id : st.search(tok)) std::cout << cvcc::hex_encode(id) << "\n";
    return 0;
}

int cmd_register(const std::string& group_name, const std::string& seed_hex,
                 const std::string& id, const std::string& pw, uint64_t expiry_ms,
                 const std::string& out_path) {
    cvcc::Bytes seed_raw = cvcc::hex_decode(seed_hex);
    if (seed_raw.size() != 32) cvcc::raise(cvcc::Errc::ParseError, "seed must be 32 bytes of hex");
    cvcc::Nonce32 seed{};
    std::copy(seed_raw.begin(), seed_raw.end(), seed.begin());

    cvcc::crypto::GroupPtr group;
    if (group_name == "toy")
        group = cvcc::crypto::make_toy_group();
    else if (group_name == "standard-curve")
        group = cvcc::crypto::make_secp256k1();
    else
        cvcc::raise(cvcc::Errc::ParseError, "group must be 'toy' or 'standard-curve'");

    cvcc::proto::RaRegistry ra;
    ra.params = cvcc::proto::ra_init(seed, group, 300);
    cvcc::proto::TpdRecord tpd =
        cvcc::proto::register_vehicle(ra, cvcc::to_bytes(id), cvcc::to_bytes(pw), expiry_ms);

    ordered_json j;
    j["group"] = group_name;
    j["ra_public"] = cvcc::hex_encode(ra.params.pub->ra_public.enc);
    j["delta_ms"] = ra.params.pub->delta_ms;
    j["tpd"] = {
        {"pid", cvcc::hex_encode(tpd.pid)},
        {"masked_v", cvcc::hex_encode(tpd.masked_v)},
        {"verifier", cvcc::hex_encode(tpd.verifier)},
        {"masked_x", cvcc::hex_encode(tpd.masked_x)},
    };
    j["certificate"] = {
        {"pid", cvcc::hex_encode(tpd.cert.pid)},
        {"public_key", cvcc::hex_encode(tpd.cert.pub.enc)},
        {"expiry_ms", tpd.cert.expiry_ms},
        {"signature", cvcc::hex_encode(tpd.cert.encode())},
    };
    std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    return 0;
}

int cmd_vectors() {
    using namespace cvcc;
    ordered_json j;
    j["sha256_empty"] = hex_encode(sha256({}));
    j["canon_AB"] = hex_encode(canon({to_bytes("AB")}));
    j["canon_A_B"] = hex_encode(canon({to_bytes("A"), to_bytes("B")}));

    auto toy = crypto::make_toy_group();
    ordered_json table = ordered_json::array();
    for (uint64_t base = 0; base <= 10; ++base) {
        crypto::Element b = toy->scalar_mul(toy->generator(), toy->scalar_from_u64(base));
        ordered_json row = ordered_json::array();
        for (uint64_t k = 0; k <= 10; ++k)
            row.push_back(hex_encode(toy->scalar_mul(b, toy->scalar_from_u64(k)).enc));
        table.push_back(row);
    }
    j["toy_power_table"] = table;

    crypto::Scalar x = toy->scalar_from_u64(3);
    crypto::Scalar k = toy->scalar_from_u64(5);
    crypto::Signature sig = crypto::schnorr_sign(*toy, x, to_bytes("msg"), k);
    j["toy_schnorr"] = {
        {"x", 3},
        {"k", 5},
        {"msg", "msg"},
        {"e", sig.e.v.to_u64()},
        {"s", sig.s.v.to_u64()},
    };

    Digest key;
    key.fill(0x11);
    Nonce32 nonce;
    nonce.fill(0x22);
    crypto::CipherText ct = crypto::stream_encrypt(key, nonce, to_bytes("hello vehicular cloud"));
    j["stream_cipher"] = {
        {"key", hex_encode(key)},
        {"nonce", hex_encode(nonce)},
        {"plaintext", "hello vehicular cloud"},
        {"body", hex_encode(ct.body)},
        {"tag", hex_encode(ct.tag)},
    };

    auto curve = crypto::make_secp256k1();
    j["secp256k1_2G"] = hex_encode(curve->scalar_mul(curve->generator(), curve->scalar_from_u64(2)).enc);

    cvcc::sim::LinkModel dsrc = cvcc::sim::LinkModel::defaults(cvcc::sim::LinkKind::Dsrc);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12e", cvcc::sim::transmit_duration(dsrc, 1024));
    j["dsrc_1024B_duration_s"] = buf;

    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CVCC secure vehicular communication stack"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out";
    uint64_t seed = 1;
    auto* run = app.add_subcommand("run", "run a scenario and write trace + metrics report");
    run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--seed", seed, "simulation seed");
    run->add_option("--out", out_dir, "output directory");

    std::string store_path, key_hex, keyword;
    auto* search = app.add_subcommand("search", "query an encrypted store by keyword");
    search->add_option("--store", store_path, "store file")->required();
    search->add_option("--key", key_hex, "search key, 64 hex chars")->required();
    search->add_option("--keyword", keyword, "keyword to look up")->required();

    std::string group_name = "toy", reg_seed_hex, reg_id, reg_pw, reg_out;
    uint64_t expiry_ms = 86'400'000;
    auto* reg = app.add_subcommand("register", "emit TPD and certificate fixtures");
    reg->add_option("--group", group_name, "toy | standard-curve");
    reg->add_option("--seed", reg_seed_hex, "RA seed, 64 hex chars")->required();
    reg->add_option("--id", reg_id, "vehicle identity")->required();
    reg->add_option("--pw", reg_pw, "vehicle password")->required();
    reg->add_option("--expiry-ms", expiry_ms, "certificate expiry");
    reg->add_option("--out", reg_out, "output file (default stdout)");

    auto* vectors = app.add_subcommand("vectors", "print crypto test vectors");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(scenario_path, seed, out_dir);
        if (search->parsed()) return cmd_search(store_path, key_hex, keyword);
        if (reg->parsed()) return cmd_register(group_name, reg_seed_hex, reg_id, reg_pw, expiry_ms, reg_out);
        if (vectors->parsed()) return cmd_vectors();
    } catch (const cvcc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
