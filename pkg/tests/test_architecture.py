"""Architecture enforcement: dependency DAG and import discipline."""

import ast
from collections import defaultdict
from pathlib import Path

REPO_ROOT = Path(__file__).parent.parent
ENGINE_ROOT = REPO_ROOT / "imrelay_sim"
CLI_ROOT = REPO_ROOT / "imrelay"

# Layered DAG inside the engine: each module may only import from its level or below.
# Peers (same level) may not cross-reference; they meet one level up.
_LAYERS = {
    "core": 0,
    "channel": 1,
    "mapping": 1,
    "waterfill": 1,
    "capacity": 2,
    "experiment": 3,
}

# Only the stream module may build bit generators; everything else asks it for a stream.
_RNG_CONSTRUCTORS = {"SeedSequence", "Philox", "default_rng", "PCG64", "MT19937", "seed"}
_RNG_ALLOWED = {"imrelay_sim/core/lib/rng.py"}


def _tree(path: Path) -> ast.Module:
    return ast.parse(path.read_text())


def _engine_unit(path: Path) -> str:
    rel = path.relative_to(ENGINE_ROOT)
    return rel.parts[0] if len(rel.parts) > 1 else rel.stem


def _collect_edges():
    """Return {(src_unit, tgt_unit): [(file, lineno, module)]}."""
    edges = defaultdict(list)
    for path in sorted(ENGINE_ROOT.rglob("*.py")):
        src = _engine_unit(path)
        if src not in _LAYERS:
            continue
        for node in ast.walk(_tree(path)):
            if not isinstance(node, ast.ImportFrom) or not node.module:
                continue
            if node.level:
                continue
            if not node.module.startswith("imrelay_sim."):
                continue
            tgt = node.module.split(".")[1]
            if tgt == src or tgt not in _LAYERS:
                continue
            edges[(src, tgt)].append((str(path.relative_to(REPO_ROOT)), node.lineno, node.module))
    return edges


def test_no_upward_or_peer_imports():
    """Engine modules must not import from their own layer or higher."""
    violations = []
    for (src, tgt), refs in sorted(_collect_edges().items()):
        if _LAYERS[tgt] >= _LAYERS[src]:
            for file, lineno, mod in refs:
                violations.append(f"  {file}:{lineno}  {src}→{tgt} (layer {_LAYERS[src]}→{_LAYERS[tgt]}): {mod}")
    assert not violations, "engine layering violated:\n" + "\n".join(violations)


def test_engine_never_imports_cli():
    violations = []
    for path in sorted(ENGINE_ROOT.rglob("*.py")):
        for node in ast.walk(_tree(path)):
            names = []
            if isinstance(node, ast.Import):
                names = [alias.name for alias in node.names]
            elif isinstance(node, ast.ImportFrom) and node.module and not node.level:
                names = [node.module]
            for name in names:
                if name == "imrelay" or name.startswith("imrelay."):
                    violations.append(f"  {path.relative_to(REPO_ROOT)}:{node.lineno}  {name}")
    assert not violations, "engine imports the command surface:\n" + "\n".join(violations)


def test_core_stays_self_contained():
    """core/ uses relative imports only, so it never reaches into engine modules."""
    violations = []
    for path in sorted((ENGINE_ROOT / "core").rglob("*.py")):
        for node in ast.walk(_tree(path)):
            if isinstance(node, ast.ImportFrom) and node.module and node.module.startswith("imrelay_sim."):
                violations.append(f"  {path.relative_to(REPO_ROOT)}:{node.lineno}  {node.module}")
    assert not violations, "core imports absolute engine paths:\n" + "\n".join(violations)


def test_random_streams_come_from_rng_module():
    violations = []
    for root in (ENGINE_ROOT, CLI_ROOT):
        for path in sorted(root.rglob("*.py")):
            rel = str(path.relative_to(REPO_ROOT))
            if rel in _RNG_ALLOWED:
                continue
            for node in ast.walk(_tree(path)):
                if isinstance(node, ast.Attribute) and node.attr in _RNG_CONSTRUCTORS:
                    base = node.value
                    if isinstance(base, ast.Attribute) and base.attr == "random":
                        violations.append(f"  {rel}:{node.lineno}  random.{node.attr}")
    assert not violations, "bit generators built outside core/lib/rng.py:\n" + "\n".join(violations)
