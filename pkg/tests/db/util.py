from algebra.rewriting import RewritingSystem
from db.schema import StoredRule, StoredSystem
from models.enums import Block
from models.rootdata import RootDatum, build_root_datum
from models.scalar import ONE, qint, to_json
from db.system_store import cartan_key, content_hash


def a2() -> RootDatum:
    return build_root_datum("A", 2)


def small_system(certified: bool = True) -> RewritingSystem:
    # the two Serre rules of U^+(A2), oriented by deglex with 1 < 2
    rules = {
        (2, 1, 1): {(1, 2, 1): qint(2), (1, 1, 2): -ONE},
        (2, 2, 1): {(2, 1, 2): qint(2), (1, 2, 2): -ONE},
    }
    return RewritingSystem(rules, label="U(A2) Serre", degree_cap=16, certified=certified, overlaps_checked=3)


def stored_row(rd: RootDatum, block: Block = Block.E, content: str | None = None) -> StoredSystem:
    system = small_system()
    return StoredSystem(
        type_label=rd.name,
        rank=rd.rank,
        cartan=cartan_key(rd),
        block=block,
        degree_cap=system.degree_cap,
        content_hash=content or content_hash(rd),
        certified=True,
        overlaps_checked=system.overlaps_checked,
        rules=[
            StoredRule(position=k, lhs=list(lhs), rhs=[[list(w), to_json(c)] for w, c in rhs.items()])
            for k, (lhs, rhs) in enumerate(system.rules.items())
        ],
    )
