#include "deepif/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "deepif/errors.hpp"

namespace deepif {

std::size_t Model::input_dim() const {
    if (dif) return dif->input_dim();
    if (iforest) return iforest->input_dim();
    return eif->input_dim();
}

std::size_t Model::tree_count() const {
    if (dif) return dif->trees().size();
    if (iforest) return iforest->trees().size();
    return eif->trees().size();
}

std::vector<double> Model::score(const DataMatrix& data, ScoringMode mode) const {
    if (dif) return score_values(*dif, data, mode);
    if (iforest) return iforest->score(data);
    return eif->score(data);
}

std::vector<ScoreBreakdown> Model::score_breakdown(const DataMatrix& data,
                                                   ScoringMode mode) const {
    if (dif) return score_dataset(*dif, data, mode);
    // Baselines expose depth-only scores; mean path / deviation fields stay
    // meaningful through the shared record machinery.
    std::vector<double> finals = iforest ? iforest->score(data) : eif->score(data);
    std::vector<ScoreBreakdown> out(finals.size());
    for (std::size_t i = 0; i < finals.size(); ++i) out[i].final_score = finals[i];
    return out;
}

Model fit_model(const DataMatrix& data, const RunConfig& config) {
    Model model;
    model.config = config;
    switch (config.algorithm) {
        case Algorithm::kDif:
            model.dif = build_forest(data, config.forest_config());
            break;
        case Algorithm::kIForest:
            model.iforest = IsolationForestModel::fit(data, config.baseline_config());
            break;
        case Algorithm::kEif:
            model.eif = EifModel::fit(data, config.baseline_config());
            break;
    }
    return model;
}

namespace {

constexpr char kMagic[4] = {'D', 'I', 'F', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void bytes(const void* data, std::size_t len) {
        const char* p = static_cast<const char*>(data);
        buf_.insert(buf_.end(), p, p + len);
    }
    void doubles(const std::vector<double>& v) {
        for (double x : v) f64(x);
    }
    const std::string& str() const { return buf_; }

private:
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::string data) : buf_(std::move(data)) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() {
        const char* p = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        const char* p = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::vector<double> doubles(std::size_t count) {
        std::vector<double> v(count);
        for (double& x : v) x = f64();
        return v;
    }
    std::string raw(std::size_t len) { return {take(len), len}; }
    bool exhausted() const { return pos_ == buf_.size(); }

private:
    const char* take(std::size_t len) {
        if (pos_ + len > buf_.size()) throw ParseError("model: truncated file");
        const char* p = buf_.data() + pos_;
        pos_ += len;
        return p;
    }
    std::string buf_;
    std::size_t pos_ = 0;
};

void write_stats(ByteWriter& w, const ColumnStats& stats) {
    w.u64(stats.cols());
    w.doubles(stats.mean);
    w.doubles(stats.stddev);
}

ColumnStats read_stats(ByteReader& r) {
    ColumnStats stats;
    const std::size_t d = r.u64();
    stats.mean = r.doubles(d);
    stats.stddev = r.doubles(d);
    return stats;
}

void write_network(ByteWriter& w, const CereNetwork& net) {
    w.u64(net.input_dim());
    w.u64(net.output_dim());
    w.u64(net.ensemble_size());
    w.u64(net.source_seed());
    w.u64(net.layers().size());
    for (const CereLayer& layer : net.layers()) {
        w.u64(layer.in_dim());
        w.u64(layer.out_dim());
        w.u8(static_cast<std::uint8_t>(layer.activation.kind));
        w.f64(layer.activation.alpha);
        w.u8(layer.apply_activation ? 1 : 0);
        w.doubles(layer.base_weights.values());
        for (const auto& p : layer.p_vectors) w.doubles(p);
        for (const auto& q : layer.q_vectors) w.doubles(q);
    }
}

CereNetwork read_network(ByteReader& r) {
    const std::size_t input_dim = r.u64();
    (void)input_dim;
    const std::size_t output_dim = r.u64();
    (void)output_dim;
    const std::size_t ensemble = r.u64();
    const std::uint64_t source_seed = r.u64();
    const std::size_t n_layers = r.u64();
    std::vector<CereLayer> layers;
    layers.reserve(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        CereLayer layer;
        const std::size_t m = r.u64();
        const std::size_t n = r.u64();
        layer.activation.kind = static_cast<Activation>(r.u8());
        layer.activation.alpha = r.f64();
        layer.apply_activation = r.u8() != 0;
        layer.base_weights = Matrix(m, n);
        const std::vector<double> flat = r.doubles(m * n);
        std::copy(flat.begin(), flat.end(), layer.base_weights.data());
        layer.p_vectors.resize(ensemble);
        for (auto& p : layer.p_vectors) p = r.doubles(m);
        layer.q_vectors.resize(ensemble);
        for (auto& q : layer.q_vectors) q = r.doubles(n);
        layers.push_back(std::move(layer));
    }
    return CereNetwork::from_layers(std::move(layers), ensemble, source_seed);
}

}  // namespace

/// Grants the reader access to tree internals without widening the public
/// construction surface.
class ModelReader {
public:
    static IsolationTree read_tree(ByteReader& r) {
        IsolationTree tree;
        tree.representation_index_ = r.u64();
        tree.depth_limit_ = r.u64();
        tree.dims_ = r.u64();
        const std::size_t n_sub = r.u64();
        tree.subsample_rows_.resize(n_sub);
        for (auto& row : tree.subsample_rows_) row = r.u32();
        const std::size_t n_nodes = r.u64();
        tree.nodes_.resize(n_nodes);
        for (TreeNode& node : tree.nodes_) {
            node.heap_id = r.u64();
            node.split_dim = r.i32();
            node.split_value = r.f64();
            node.size = r.u32();
            node.depth = r.u32();
            node.left = r.i32();
            node.right = r.i32();
        }
        return tree;
    }

    static void write_tree(ByteWriter& w, const IsolationTree& tree) {
        w.u64(tree.representation_index());
        w.u64(tree.depth_limit());
        w.u64(tree.dims());
        w.u64(tree.subsample_rows().size());
        for (std::uint32_t row : tree.subsample_rows()) w.u32(row);
        w.u64(tree.nodes().size());
        for (const TreeNode& node : tree.nodes()) {
            w.u64(node.heap_id);
            w.i32(node.split_dim);
            w.f64(node.split_value);
            w.u32(node.size);
            w.u32(node.depth);
            w.i32(node.left);
            w.i32(node.right);
        }
    }

    static EifTree read_eif_tree(ByteReader& r) {
        EifTree tree;
        tree.dims_ = r.u64();
        tree.depth_limit_ = r.u64();
        const std::size_t n_sub = r.u64();
        tree.subsample_rows_.resize(n_sub);
        for (auto& row : tree.subsample_rows_) row = r.u32();
        const std::size_t n_nodes = r.u64();
        tree.nodes_.resize(n_nodes);
        for (EifNode& node : tree.nodes_) {
            node.heap_id = r.u64();
            const bool internal = r.u8() != 0;
            node.size = r.u32();
            node.depth = r.u32();
            node.left = r.i32();
            node.right = r.i32();
            if (internal) {
                node.normal_vector = r.doubles(tree.dims_);
                node.intercept_point = r.doubles(tree.dims_);
            }
        }
        return tree;
    }

    static void write_eif_tree(ByteWriter& w, const EifTree& tree) {
        w.u64(tree.dims());
        w.u64(tree.depth_limit());
        w.u64(tree.subsample_rows().size());
        for (std::uint32_t row : tree.subsample_rows()) w.u32(row);
        w.u64(tree.nodes().size());
        for (const EifNode& node : tree.nodes()) {
            w.u64(node.heap_id);
            w.u8(node.is_leaf() ? 0 : 1);
            w.u32(node.size);
            w.u32(node.depth);
            w.i32(node.left);
            w.i32(node.right);
            if (!node.is_leaf()) {
                w.doubles(node.normal_vector);
                w.doubles(node.intercept_point);
            }
        }
    }

    static IsolationForestModel make_iforest(std::vector<IsolationTree> trees,
                                             ColumnStats stats, BaselineConfig config,
                                             std::size_t effective_n, std::size_t depth) {
        IsolationForestModel model;
        model.trees_ = std::move(trees);
        model.stats_ = std::move(stats);
        model.config_ = config;
        model.effective_subsample_ = effective_n;
        model.depth_limit_used_ = depth;
        return model;
    }

    static EifModel make_eif(std::vector<EifTree> trees, ColumnStats stats,
                             BaselineConfig config, std::size_t effective_n,
                             std::size_t depth) {
        EifModel model;
        model.trees_ = std::move(trees);
        model.stats_ = std::move(stats);
        model.config_ = config;
        model.effective_subsample_ = effective_n;
        model.depth_limit_used_ = depth;
        return model;
    }
};

namespace {

struct Section {
    char tag[5];
    std::string payload;
};

void write_container(const std::string& path, const RunConfig& config,
                     const std::vector<Section>& sections) {
    ByteWriter out;
    out.bytes(kMagic, 4);
    out.u32(kFormatVersion);
    out.u8(static_cast<std::uint8_t>(config.algorithm));
    out.u64(config.seed);
    out.u64(config_hash(config));
    out.u32(static_cast<std::uint32_t>(sections.size()));
    for (const Section& s : sections) {
        out.bytes(s.tag, 4);
        out.u64(s.payload.size());
        out.bytes(s.payload.data(), s.payload.size());
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write model file " + path);
    file.write(out.str().data(), static_cast<std::streamsize>(out.str().size()));
    if (!file) throw IoError("failed writing model file " + path);
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
    std::vector<Section> sections;

    {
        Section conf{"CONF", canonical_config(model.config)};
        sections.push_back(std::move(conf));
    }
    {
        ByteWriter w;
        if (model.dif) {
            write_stats(w, model.dif->stats());
        } else if (model.iforest) {
            write_stats(w, model.iforest->stats());
        } else {
            write_stats(w, model.eif->stats());
        }
        Section stat{"STAT", w.str()};
        sections.push_back(std::move(stat));
    }
    if (model.dif) {
        ByteWriter w;
        write_network(w, model.dif->network());
        Section cere{"CERE", w.str()};
        sections.push_back(std::move(cere));

        ByteWriter t;
        t.u64(model.dif->effective_subsample());
        t.u64(model.dif->depth_limit_used());
        t.u64(model.dif->trees().size());
        for (const IsolationTree& tree : model.dif->trees()) {
            ModelReader::write_tree(t, tree);
        }
        Section trees{"TREE", t.str()};
        sections.push_back(std::move(trees));
    } else if (model.iforest) {
        ByteWriter t;
        t.u64(model.iforest->effective_subsample());
        t.u64(model.iforest->depth_limit_used());
        t.u64(model.iforest->trees().size());
        for (const IsolationTree& tree : model.iforest->trees()) {
            ModelReader::write_tree(t, tree);
        }
        Section trees{"TREE", t.str()};
        sections.push_back(std::move(trees));
    } else {
        ByteWriter t;
        t.u64(model.eif->effective_subsample());
        t.u64(model.eif->depth_limit_used());
        t.u64(model.eif->trees().size());
        for (const EifTree& tree : model.eif->trees()) {
            ModelReader::write_eif_tree(t, tree);
        }
        Section trees{"ETRE", t.str()};
        sections.push_back(std::move(trees));
    }
    write_container(path, model.config, sections);
}

Model load_model(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open model file " + path);
    std::string blob((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    ByteReader r(std::move(blob));

    const std::string magic = r.raw(4);
    if (std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw ParseError("model: bad magic in " + path);
    }
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion) {
        throw ParseError("model: unsupported format version " + std::to_string(version));
    }
    const Algorithm algo = static_cast<Algorithm>(r.u8());
    const std::uint64_t seed = r.u64();
    const std::uint64_t stored_hash = r.u64();
    const std::uint32_t n_sections = r.u32();

    RunConfig config;
    ColumnStats stats;
    std::optional<CereNetwork> network;
    std::vector<IsolationTree> trees;
    std::vector<EifTree> eif_trees;
    std::size_t effective_n = 0, depth_used = 0;

    for (std::uint32_t s = 0; s < n_sections; ++s) {
        const std::string tag = r.raw(4);
        const std::size_t len = r.u64();
        ByteReader section(r.raw(len));
        if (tag == "CONF") {
            // Canonical text round-trips through the normal entry parser.
            std::istringstream conf_in(section.raw(len));
            std::string line;
            while (std::getline(conf_in, line)) {
                const std::size_t eq = line.find('=');
                if (eq == std::string::npos) continue;
                apply_config_entry(config, line.substr(0, eq), line.substr(eq + 1));
            }
        } else if (tag == "STAT") {
            stats = read_stats(section);
        } else if (tag == "CERE") {
            network = read_network(section);
        } else if (tag == "TREE") {
            effective_n = section.u64();
            depth_used = section.u64();
            const std::size_t count = section.u64();
            trees.reserve(count);
            for (std::size_t i = 0; i < count; ++i) {
                trees.push_back(ModelReader::read_tree(section));
            }
        } else if (tag == "ETRE") {
            effective_n = section.u64();
            depth_used = section.u64();
            const std::size_t count = section.u64();
            eif_trees.reserve(count);
            for (std::size_t i = 0; i < count; ++i) {
                eif_trees.push_back(ModelReader::read_eif_tree(section));
            }
        } else {
            throw ParseError("model: unknown section '" + tag + "'");
        }
    }

    if (config.seed != seed || config.algorithm != algo) {
        throw ParseError("model: header disagrees with embedded config");
    }
    if (stored_hash != config_hash(config)) {
        throw ParseError("model: config hash mismatch (corrupt file?)");
    }

    Model model;
    model.config = config;
    switch (algo) {
        case Algorithm::kDif: {
            if (!network || trees.empty()) throw ParseError("model: missing DIF sections");
            model.dif.emplace(std::move(*network), std::move(trees), config.forest_config(),
                              std::move(stats), effective_n, depth_used);
            break;
        }
        case Algorithm::kIForest: {
            if (trees.empty()) throw ParseError("model: missing tree section");
            BaselineConfig bc = config.baseline_config();
            model.iforest = ModelReader::make_iforest(std::move(trees), std::move(stats), bc,
                                                      effective_n, depth_used);
            break;
        }
        case Algorithm::kEif: {
            if (eif_trees.empty()) throw ParseError("model: missing tree section");
            BaselineConfig bc = config.baseline_config();
            model.eif = ModelReader::make_eif(std::move(eif_trees), std::move(stats), bc,
                                              effective_n, depth_used);
            break;
        }
        default:
            throw ParseError("model: unknown algorithm byte");
    }
    return model;
}

}  // namespace deepif
