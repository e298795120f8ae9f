#!/usr/bin/env node
/**
 * Figure CLI: one subcommand per figure kind, each taking the producing
 * run's CSV artifact(s) via --in and writing an SVG to --out.
 *
 * Input order is positional within --in: the row table first, then the
 * summary table (rate, scan) or the profile tables (wave).  A schema
 * mismatch — wrong header, wrong cell type, no data rows — exits nonzero
 * naming the offending column.
 */

import { mkdirSync, writeFileSync } from "fs";
import { dirname } from "path";
import { pathToFileURL } from "url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { readEquilibria, readModes, readOde3, readRate, readScan,
         readSummary, readWave, SchemaError } from "./csv.js";
import { renderEquilibriaFigure, renderOde3Figure, renderRateFigure,
         renderScanFigure, renderWaveFigure } from "./figures.js";

interface Job {
  inputs: string[];
  out: string;
}

function needInputs(job: Job, count: number, what: string): void {
  if (job.inputs.length < count) {
    throw new SchemaError(
      `expected at least ${count} --in file${count > 1 ? "s" : ""}: ${what}`,
      "");
  }
}

const RENDERERS: Record<string, { describe: string; inputs: string;
                                  render: (job: Job) => string }> = {
  rate: {
    describe: "averaging-error log-log plot with the fitted slope",
    inputs: "rate.csv rate_summary.csv",
    render: job => {
      needInputs(job, 2, "rate.csv rate_summary.csv");
      return renderRateFigure(readRate(job.inputs[0]),
                              readSummary(job.inputs[1]), job.inputs[1]);
    },
  },
  scan: {
    describe: "attractor statistic vs dispersion with the fitted slope",
    inputs: "scan.csv scan_summary.csv",
    render: job => {
      needInputs(job, 2, "scan.csv scan_summary.csv");
      return renderScanFigure(readScan(job.inputs[0]),
                              readSummary(job.inputs[1]), job.inputs[1]);
    },
  },
  wave: {
    describe: "physical-space traveling-wave profiles",
    inputs: "wave.csv wave_profile_*.csv...",
    render: job => {
      needInputs(job, 2, "wave.csv plus profile CSVs");
      const waveRows = readWave(job.inputs[0]);
      const profiles = job.inputs.slice(1).map(path => ({
        path, modes: readModes(path),
      }));
      return renderWaveFigure(waveRows, profiles);
    },
  },
  equilibria: {
    describe: "equilibrium diagram with stability markers",
    inputs: "equilibria.csv",
    render: job => {
      needInputs(job, 1, "equilibria.csv");
      return renderEquilibriaFigure(readEquilibria(job.inputs[0]));
    },
  },
  ode3: {
    describe: "top-exponent heat map of the polar reduction",
    inputs: "ode3.csv",
    render: job => {
      needInputs(job, 1, "ode3.csv");
      return renderOde3Figure(readOde3(job.inputs[0]));
    },
  },
};

export async function runCli(argv: string[]): Promise<number> {
  let job: Job | null = null;
  let kind = "";

  const parser = yargs(argv)
    .scriptName("displab-figures")
    .usage("$0 <kind> --in <csv...> --out <svg>")
    .option("in", {
      type: "string",
      array: true,
      demandOption: true,
      describe: "input CSV artifact(s), row table first",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .demandCommand(1, "pick a figure kind")
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      if (err) throw err;
      throw new SchemaError(msg, "");
    });

  for (const [name, spec] of Object.entries(RENDERERS)) {
    parser.command(`${name}`, `${spec.describe} (inputs: ${spec.inputs})`,
                   () => {}, args => {
                     kind = name;
                     job = { inputs: args.in as string[],
                             out: args.out as string };
                   });
  }

  try {
    await parser.parseAsync();
    if (!job) {
      throw new SchemaError(`unknown figure kind; pick one of ${
        Object.keys(RENDERERS).join(", ")}`, "");
    }
    const svg = RENDERERS[kind].render(job);
    const target = (job as Job).out;
    mkdirSync(dirname(target), { recursive: true });
    writeFileSync(target, svg, "utf8");
    console.log(`wrote ${target}`);
    return 0;
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    console.error(`displab-figures: ${message}`);
    return 1;
  }
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  runCli(hideBin(process.argv)).then(code => {
    process.exitCode = code;
  });
}
