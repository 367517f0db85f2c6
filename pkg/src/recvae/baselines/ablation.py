"""Feature subsets for the ablation study; all flags off reproduces Mult-VAE."""
from dataclasses import asdict, dataclass, replace

from ..model import ModelConfig
from ..training import TrainConfig

FLAGS = ("new_architecture", "composite_prior", "beta_rescaling",
         "alternating_training", "decoder_without_denoising")


@dataclass(frozen=True)
class AblationConfig:
    new_architecture: bool = True
    composite_prior: bool = True
    beta_rescaling: bool = True
    alternating_training: bool = True
    decoder_without_denoising: bool = True

    @property
    def code(self):
        return "".join("1" if getattr(self, f) else "0" for f in FLAGS)

    @classmethod
    def from_code(cls, code):
        if len(code) != len(FLAGS) or set(code) - {"0", "1"}:
            raise ValueError(f"ablation code must be {len(FLAGS)} characters of 0/1, got {code!r}")
        return cls(*(c == "1" for c in code))

    def as_dict(self):
        return asdict(self)


MULT_VAE = AblationConfig(False, False, False, False, False)
FULL = AblationConfig()

# the eleven standard study rows, from Mult-VAE to the full model
TABLE_ROWS = tuple(AblationConfig.from_code(c) for c in (
    "00000", "10000", "11000", "10100", "10011", "11100",
    "01111", "10111", "11011", "11110", "11111",
))


def configure_ablation(flags, base=None, fixed_beta=0.2):
    """Training config for a feature subset, starting from ``base``.

    Switched-off features fall back to: a one-layer tanh encoder, the
    standard normal prior, a constant KL weight ``fixed_beta``, joint
    updates of encoder and decoder, and noised decoder inputs.
    """
    base = base or TrainConfig()
    model = replace(
        base.model,
        architecture="dense" if flags.new_architecture else "plain",
        prior="composite" if flags.composite_prior else "standard",
        beta_mode="rescaled" if flags.beta_rescaling else "fixed",
        fixed_beta=fixed_beta,
    )
    return replace(base, model=model, alternating=flags.alternating_training,
                   decoder_denoising=not flags.decoder_without_denoising)


def format_table(results):
    """TSV with one row per subset: the five flags, NDCG@100 and its interval half-width."""
    lines = ["\t".join(FLAGS + ("ndcg@100", "ci"))]
    for flags, (score, ci) in results:
        lines.append("\t".join([str(int(getattr(flags, f))) for f in FLAGS]
                               + [repr(float(score)), repr(float(ci))]))
    return "\n".join(lines) + "\n"


def parse_table(text):
    lines = [line for line in text.splitlines() if line.strip()]
    header = lines[0].split("\t")
    if tuple(header[:len(FLAGS)]) != FLAGS:
        raise ValueError("not an ablation table")
    rows = []
    for line in lines[1:]:
        cells = line.split("\t")
        flags = AblationConfig(*(c == "1" for c in cells[:len(FLAGS)]))
        rows.append((flags, (float(cells[-2]), float(cells[-1]))))
    return rows

