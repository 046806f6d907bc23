"""Loader for the CoIL 2000 insurance-company benchmark (UCI "Insurance Company")."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .data import Dataset, load_csv
from .errors import DataError

FEATURES = (
    "MOSTYPE MAANTHUI MGEMOMV MGEMLEEF MOSHOOFD MGODRK MGODPR MGODOV MGODGE MRELGE MRELSA "
    "MRELOV MFALLEEN MFGEKIND MFWEKIND MOPLHOOG MOPLMIDD MOPLLAAG MBERHOOG MBERZELF MBERBOER "
    "MBERMIDD MBERARBG MBERARBO MSKA MSKB1 MSKB2 MSKC MSKD MHHUUR MHKOOP MAUT1 MAUT2 MAUT0 "
    "MZFONDS MZPART MINKM30 MINK3045 MINK4575 MINK7512 MINK123M MINKGEM MKOOPKLA PWAPART "
    "PWABEDR PWALAND PPERSAUT PBESAUT PMOTSCO PVRAAUT PAANHANG PTRACTOR PWERKT PBROM PLEVEN "
    "PPERSONG PGEZONG PWAOREG PBRAND PZEILPL PPLEZIER PFIETS PINBOED PBYSTAND AWAPART AWABEDR "
    "AWALAND APERSAUT ABESAUT AMOTSCO AVRAAUT AAANHANG ATRACTOR AWERKT ABROM ALEVEN APERSONG "
    "AGEZONG AWAOREG ABRAND AZEILPL APLEZIER AFIETS AINBOED ABYSTAND"
).split()
CLASS = "CARAVAN"
# customer subtype and main type are nominal codes; the rest are ordinal bands or counts
CATEGORICAL = ("MOSTYPE", "MOSHOOFD")
N_TRAIN = 5000


def load_coil(directory, n_train: int = N_TRAIN):
    """Return ``(train, test)`` from a directory holding the CoIL files.

    Preferred layout is the original UCI trio ``ticdata2000.txt``,
    ``ticeval2000.txt`` and ``tictgts2000.txt`` (tab separated, no header):
    the first ``n_train`` rows of the training file and all 4000 evaluation
    rows. Failing that, a ``Caravan.csv`` copy of the training file (header
    row, ``Purchase`` = Yes/No) is split into its first ``n_train`` rows and
    the remainder.
    """
    d = Path(directory)
    tic = [d / "ticdata2000.txt", d / "ticeval2000.txt", d / "tictgts2000.txt"]
    if all(p.exists() for p in tic):
        full = load_csv(tic[0], delimiter="\t", column_names=FEATURES + [CLASS],
                        class_column=CLASS, categorical_columns=CATEGORICAL)
        targets = tic[2].read_text().split()
        rows = [line.rstrip("\n") + "\t" + t for line, t in
                zip(tic[1].read_text().splitlines(), targets)]
        merged = d / ".ticeval_with_targets.txt"
        merged.write_text("\n".join(rows) + "\n")
        test = load_csv(merged, delimiter="\t", column_names=FEATURES + [CLASS],
                        class_column=CLASS, categorical_columns=CATEGORICAL)
        test = _align_labels(test, full.class_labels)
        return full.take(range(min(n_train, full.n_rows))), test
    caravan = d / "Caravan.csv"
    if caravan.exists():
        full = load_csv(caravan, class_column="Purchase", categorical_columns=CATEGORICAL,
                        class_map={"No": "0", "Yes": "1"})
        if full.n_rows <= n_train:
            raise DataError(f"{caravan} has only {full.n_rows} rows")
        return full.take(range(n_train)), full.take(range(n_train, full.n_rows))
    raise DataError(f"no CoIL data found in {d}")


def _align_labels(data, labels):
    """Re-index ``data``'s classes onto ``labels`` (first-appearance order may differ)."""
    if data.class_labels == labels:
        return data
    lookup = [labels.index(lab) for lab in data.class_labels]
    return Dataset(data.schema, labels, data.values, data.missing,
                   np.asarray(lookup)[data.classes], name=data.name)
