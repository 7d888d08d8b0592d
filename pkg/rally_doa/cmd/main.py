# All Rights Reserved.
#
#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

"""``doa`` command line: gen, train, transfer, eval and compare."""

import argparse
import csv
import json
import os
import sys

from rally.common import cfg
from rally.common import logging

from rally_doa.array import dataset as doa_dataset
from rally_doa.array import geometry as geo
from rally_doa.array import presets
from rally_doa.array import simulator
from rally_doa.common import runconfig
from rally_doa.common import utils
from rally_doa.metrics import report as doa_report
from rally_doa.model import checkpoint as doa_checkpoint
from rally_doa.model import config as model_config
from rally_doa.model import trainer
from rally_doa.services.doa import doa as doa_service
from rally_doa.transfer import calibration
from rally_doa import exceptions

CONF = cfg.CONF
LOG = logging.getLogger(__name__)

PRODUCT = "rally-doa"
TRANSFER = "transfer"
FINETUNE = "finetune"
DIRECT = "direct"
TRANSFER_MODES = (TRANSFER, FINETUNE, DIRECT)
PRESET_SWEEP = "preset"


def _scenario_args(parser):
    parser.add_argument("--scenario", choices=presets.names(),
                        help="scenario preset (default: %s)"
                             % presets.DEFAULT_PRESET)
    parser.add_argument("--params", help="parameter set of the preset")
    parser.add_argument("--snr", type=float, dest="snr_db",
                        help="per-source SNR, dB")
    parser.add_argument("--snapshots", type=int, help="snapshot count T")
    parser.add_argument("--min-sep", type=float, dest="min_sep",
                        help="minimum DOA separation, deg")
    parser.add_argument("--rho", type=float,
                        help="imperfection strength in [0, 1]")


def _common_args(parser):
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--seed", type=int, help="run seed")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="doa", description="DOA estimation with TransDOA and MUSIC")
    parser.add_argument("--debug", action="store_true",
                        help="print debugging output")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    gen = commands.add_parser("gen", help="simulate a labelled SCM dataset")
    _common_args(gen)
    _scenario_args(gen)
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--out", required=True, help="DOA1 dataset path")
    gen.set_defaults(func=cmd_gen)

    train = commands.add_parser("train", help="train a TransDOA model")
    _common_args(train)
    train.add_argument("--train", required=True, dest="train_data")
    train.add_argument("--val", required=True, dest="val_data")
    train.add_argument("--epochs", type=int)
    train.add_argument("--out", required=True, help="DOAW checkpoint path")
    train.set_defaults(func=cmd_train)

    transfer = commands.add_parser(
        "transfer", help="calibrate a model to imperfect target data")
    _common_args(transfer)
    _scenario_args(transfer)
    transfer.add_argument("--source", help="checkpoint trained on ideal data")
    transfer.add_argument("--target-data", required=True, dest="target_data")
    transfer.add_argument("--samples", type=int, required=True)
    transfer.add_argument("--alpha", type=float)
    transfer.add_argument("--beta", type=float)
    transfer.add_argument("--epochs", type=int,
                          help="training epochs of the direct and finetune "
                               "modes")
    transfer.add_argument("--transfer-epochs", type=int,
                          dest="transfer_epochs",
                          help="alignment epochs of the transfer mode")
    transfer.add_argument("--head-policy", dest="head_policy",
                          choices=[calibration.REUSE_SOURCE_HEAD,
                                   calibration.FINE_TUNE_HEAD])
    transfer.add_argument("--mode", choices=TRANSFER_MODES,
                          default=TRANSFER)
    transfer.add_argument("--out", required=True, help="DOAW checkpoint path")
    transfer.set_defaults(func=cmd_transfer)

    ev = commands.add_parser("eval", help="score an estimator")
    _common_args(ev)
    _scenario_args(ev)
    ev.add_argument("--method", choices=doa_service.METHODS, required=True)
    ev.add_argument("--ckpt")
    ev.add_argument("--data", help="DOA1 dataset; omit for sweeps")
    ev.add_argument("--report", required=True, help="JSON report path")
    ev.add_argument("--csv", help="per-trial CSV path")
    ev.add_argument("--count", type=int,
                    help="records generated per sweep point")
    sweeps = ev.add_mutually_exclusive_group()
    sweeps.add_argument("--snr-sweep", dest="snr_sweep", metavar="LO:HI:STEP",
                        help="SNR grid in dB, or 'preset'")
    sweeps.add_argument("--snapshots-sweep", dest="snapshots_sweep",
                        metavar="LO:HI:STEP",
                        help="snapshot grid, or 'preset'")
    sweeps.add_argument("--rho-sweep", dest="rho_sweep", metavar="LO:HI:STEP")
    ev.set_defaults(func=cmd_eval)

    compare = commands.add_parser(
        "compare", help="direct-train, fine-tune and transfer vs N")
    _common_args(compare)
    _scenario_args(compare)
    compare.add_argument("--source", required=True)
    compare.add_argument("--target-data", required=True, dest="target_data")
    compare.add_argument("--test-data", required=True, dest="test_data")
    compare.add_argument("--samples", type=int, nargs="+",
                         default=list(calibration.DEFAULT_SAMPLE_GRID))
    compare.add_argument("--out", required=True,
                         help="CSV path; a JSON copy is written next to it")
    compare.set_defaults(func=cmd_compare)
    return parser


def run_config(args, **sections):
    """RunConfig from --config overlaid with the command line."""
    scenario = dict((name, getattr(args, name, None))
                    for name in ("params", "snr_db", "snapshots", "min_sep"))
    scenario["preset"] = getattr(args, "scenario", None)
    overrides = {"scenario": scenario,
                 "imperfections": {"rho": getattr(args, "rho", None)},
                 "seed": args.seed}
    for name, values in sections.items():
        overrides[name] = values
    overrides = runconfig.merge({}, _drop_none(overrides))
    data = runconfig.load(args.config) if args.config else {}
    return runconfig.RunConfig(runconfig.merge(data, overrides))


def _drop_none(data):
    result = {}
    for key, value in data.items():
        if isinstance(value, dict):
            value = _drop_none(value)
            if not value:
                continue
        if value is not None:
            result[key] = value
    return result


def _write_sidecar(path, config):
    with utils.open_output(doa_report.sidecar_path(path)) as f:
        f.write(json.dumps(config, sort_keys=True, indent=2) + "\n")


def _data_scenario(rc, data):
    """Scenario of the run if it matches `data`, else one built from its
    header with default geometry and field of view.
    """
    scenario = rc.scenario()
    g = scenario.geometry
    if (g.kind, g.element_count, scenario.source_count) == \
            (data.kind, data.element_count, data.source_count):
        return scenario
    return simulator.SignalScenario(
        geo.ArrayGeometry(data.kind, data.element_count),
        data.source_count, scenario.snr_db, scenario.snapshots)


def cmd_gen(args, service):
    rc = run_config(args)
    scenario = rc.scenario()
    imp = rc.imperfections(scenario.geometry)
    service.generate_dataset(scenario=scenario, imp=imp, count=args.count,
                             seed=rc.seed, output_path=args.out)
    config = rc.resolved()
    config["count"] = args.count
    _write_sidecar(args.out, config)


def _epoch_printer(out):
    out.write(trainer.CSV_HEADER + "\n")

    def on_epoch(record):
        out.write(record.csv() + "\n")
        out.flush()

    return on_epoch


def cmd_train(args, service):
    rc = run_config(args, training={"epochs": args.epochs})
    train_set = doa_dataset.DoaDataset.load(args.train_data)
    val_set = doa_dataset.DoaDataset.load(args.val_data)
    config = model_config.ModelConfig.for_dataset(train_set,
                                                  **rc.data["model"])
    meta = {"config": rc.resolved(),
            "train_digest": utils.file_digest(args.train_data),
            "val_digest": utils.file_digest(args.val_data)}
    checkpoint, _ = service.train(config=config, train_set=train_set,
                                  val_set=val_set,
                                  train_config=rc.train_config(),
                                  seed=rc.seed,
                                  on_epoch=_epoch_printer(sys.stdout),
                                  meta=meta)
    doa_checkpoint.save_checkpoint(args.out, checkpoint)


def cmd_transfer(args, service):
    rc = run_config(args,
                    training={"epochs": args.epochs},
                    transfer={"alpha": args.alpha, "beta": args.beta,
                              "epochs": args.transfer_epochs,
                              "head_policy": args.head_policy})
    target = doa_dataset.DoaDataset.load(args.target_data)
    subset = calibration.select_samples(target, args.samples)
    meta = {"mode": args.mode, "samples": args.samples,
            "target_digest": utils.file_digest(args.target_data)}
    if args.mode == DIRECT:
        config = model_config.ModelConfig.for_dataset(target,
                                                      **rc.data["model"])
        checkpoint, _ = service.direct_train(
            config=config, dataset=subset, train_config=rc.train_config(),
            seed=rc.seed,
            on_epoch=_epoch_printer(sys.stdout))
    else:
        if not args.source:
            raise exceptions.InvalidArgument(
                "--source is required for --mode %s" % args.mode)
        source = doa_checkpoint.load_checkpoint(args.source)
        meta["source_digest"] = utils.file_digest(args.source)
        if args.mode == FINETUNE:
            checkpoint, _ = service.finetune(
                source=source, dataset=subset,
                train_config=rc.train_config(), seed=rc.seed,
                on_epoch=_epoch_printer(sys.stdout))
        else:
            paired = service.make_pairs(
                target=subset, scenario=_data_scenario(rc, target),
                seed=utils.role_seed(rc.seed, "pairs"))
            sys.stdout.write("epoch,alignment_loss\n")

            def on_epoch(epoch, value):
                sys.stdout.write("%d,%.10g\n" % (epoch, value))

            checkpoint, _ = service.transfer(source=source, paired=paired,
                                             transfer_config=(
                                                 rc.transfer_config()),
                                             seed=rc.seed,
                                             on_epoch=on_epoch)
    meta["config"] = rc.resolved()
    checkpoint.meta.update(meta)
    doa_checkpoint.save_checkpoint(args.out, checkpoint)


def _sweep(args, rc):
    """(swept quantity, values); `preset` takes the range stored with
    the parameter set.
    """
    for name, value in (("snr_db", args.snr_sweep),
                        ("snapshots", args.snapshots_sweep),
                        ("rho", args.rho_sweep)):
        if value == PRESET_SWEEP:
            value = presets.sweep_range(rc.preset,
                                        rc.data["scenario"]["params"], name)
        if value:
            return name, utils.parse_range(value)
    return None, None


def sweep_report_path(path, name, value):
    root, ext = os.path.splitext(path)
    return "%s.%s_%g%s" % (root, name, value, ext or ".json")


def _evaluate(args, service, rc, data, checkpoint, path, extra=None):
    scenario = _data_scenario(rc, data)
    report, trials = service.evaluate(method=args.method, dataset=data,
                                      checkpoint=checkpoint,
                                      scenario=scenario)
    config = rc.resolved()
    config["eval"] = dict(extra or {}, method=args.method,
                          error_cap=CONF.doa.error_cap,
                          tolerance=CONF.doa.tolerance)
    if checkpoint is not None:
        config["eval"]["ckpt_digest"] = utils.file_digest(args.ckpt)
    doc = doa_report.report_document(report, args.method, scenario.name,
                                     rc.seed, config)
    doa_report.write_report(path, doc, config)
    return trials


def cmd_eval(args, service):
    rc = run_config(args)
    checkpoint = None
    if args.method == doa_service.TRANSDOA:
        if not args.ckpt:
            raise exceptions.InvalidArgument(
                "--ckpt is required for --method transdoa")
        checkpoint = doa_checkpoint.load_checkpoint(args.ckpt)
    name, values = _sweep(args, rc)
    if name is None:
        if not args.data:
            raise exceptions.InvalidArgument(
                "--data is required unless a sweep is requested")
        data = doa_dataset.DoaDataset.load(args.data)
        trials = _evaluate(args, service, rc, data, checkpoint, args.report,
                           {"data_digest": utils.file_digest(args.data)})
        if args.csv:
            doa_report.write_trials_csv(args.csv, trials)
        return

    count = args.count or rc.counts("test")
    for value in values:
        if name == "rho":
            point = run_config(args, imperfections={"rho": value})
        else:
            if name == "snapshots":
                value = int(value)
            point = run_config(args, scenario={name: value})
        scenario = point.scenario()
        data = service.generate_dataset(
            scenario=scenario, imp=point.imperfections(scenario.geometry),
            count=count, seed=utils.role_seed(point.seed, "test"))
        _evaluate(args, service, point, data, checkpoint,
                  sweep_report_path(args.report, name, value),
                  {"sweep": name, "count": count})


def cmd_compare(args, service):
    rc = run_config(args)
    source = doa_checkpoint.load_checkpoint(args.source)
    pool = doa_dataset.DoaDataset.load(args.target_data)
    test_set = doa_dataset.DoaDataset.load(args.test_data)
    rows = service.compare(source=source, pool=pool,
                           scenario=_data_scenario(rc, pool),
                           test_set=test_set, sample_counts=args.samples,
                           transfer_config=rc.transfer_config(),
                           train_config=rc.train_config(), seed=rc.seed)
    with utils.open_output(args.out) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(calibration.ArmsRow._fields)
        for row in rows:
            writer.writerow([row.samples] + ["%.6f" % v for v in row[1:]])
    root, _ = os.path.splitext(args.out)
    with utils.open_output(root + ".json") as f:
        f.write(json.dumps({"config": rc.resolved(),
                            "rows": [row._asdict() for row in rows]},
                           sort_keys=True, indent=2) + "\n")


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.debug:
        CONF.set_override("debug", True)
    # stdout carries the CSV curves
    CONF.set_override("use_stderr", True)
    logging.setup(PRODUCT)
    service = doa_service.DoaService()
    try:
        args.func(args, service)
    except exceptions.DoaException as e:
        LOG.error(e.format_message())
        if args.debug:
            LOG.exception(e)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
