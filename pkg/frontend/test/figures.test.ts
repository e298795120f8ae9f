import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { fileURLToPath } from "url";
import { afterEach, describe, expect, it, vi } from "vitest";

import { readEquilibria, readModes, readOde3, readRate, readScan,
         readSummary, readWave, SchemaError } from "../src/csv";
import { renderEquilibriaFigure, renderOde3Figure, renderRateFigure,
         renderScanFigure, renderWaveFigure } from "../src/figures";
import { runCli } from "../src/main";

const fixture = (rel: string) =>
  fileURLToPath(new URL(`./fixtures/${rel}`, import.meta.url));

function scratchDir(): string {
  return mkdtempSync(join(tmpdir(), "figures-"));
}

/** The raw value cell of a key,value summary line, untouched. */
function rawSummaryValue(path: string, key: string): string {
  for (const line of readFileSync(path, "utf8").split("\n")) {
    if (line.startsWith(`${key},`)) return line.slice(key.length + 1);
  }
  throw new Error(`no ${key} row in ${path}`);
}

function countMatches(svg: string, pattern: RegExp): number {
  return (svg.match(pattern) ?? []).length;
}

describe("renderRateFigure", () => {
  const rowsPath = fixture("rate_run/rate.csv");
  const summaryPath = fixture("rate_run/rate_summary.csv");

  it("annotates the slope exactly as the summary CSV spells it", () => {
    const svg = renderRateFigure(readRate(rowsPath),
                                 readSummary(summaryPath), summaryPath);
    const slopeRaw = rawSummaryValue(summaryPath, "slope");
    expect(svg).toContain(`slope = ${slopeRaw}`);
    // the artifact carries the full 17-digit value; pin it so a silently
    // reformatted or re-fitted annotation cannot slip through
    expect(slopeRaw).toBe("1.0838185179637934");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
  });

  it("quotes a doctored slope verbatim instead of refitting", () => {
    const dir = scratchDir();
    const doctored = join(dir, "rate_summary.csv");
    // rows still imply slope ~1; the figure must trust the summary
    writeFileSync(doctored,
      "key,value\nfamily,gl2\nslope,2.75000\nintercept,3.50\n", "utf8");
    const svg = renderRateFigure(readRate(rowsPath),
                                 readSummary(doctored), doctored);
    expect(svg).toContain("slope = 2.75000");  // trailing zeros kept
    expect(svg).not.toContain("slope = 1.08");
  });

  it("renders a minimal two-point table", () => {
    const dir = scratchDir();
    const rows = join(dir, "rate.csv");
    const summary = join(dir, "rate_summary.csv");
    writeFileSync(rows,
      "L,eps,err_h1\n50,0.02,0.004\n100,0.01,0.002\n", "utf8");
    writeFileSync(summary, "key,value\nslope,1\nintercept,-1.2\n", "utf8");
    const svg = renderRateFigure(readRate(rows), readSummary(summary),
                                 summary);
    expect(svg).toContain("slope = 1");
    expect(countMatches(svg, /<circle /g)).toBe(2);
  });

  it("refuses a summary without a slope row", () => {
    const dir = scratchDir();
    const summary = join(dir, "rate_summary.csv");
    writeFileSync(summary, "key,value\nfamily,gl2\n", "utf8");
    expect(() => renderRateFigure(readRate(rowsPath),
                                  readSummary(summary), summary))
      .toThrowError(SchemaError);
  });
});

describe("renderScanFigure", () => {
  const rowsPath = fixture("scan_run/scan.csv");
  const summaryPath = fixture("scan_run/scan_summary.csv");

  it("annotates the slope exactly as the summary CSV spells it", () => {
    const svg = renderScanFigure(readScan(rowsPath),
                                 readSummary(summaryPath), summaryPath);
    const slopeRaw = rawSummaryValue(summaryPath, "slope");
    expect(svg).toContain(`slope = ${slopeRaw}`);
    expect(slopeRaw).toBe("0.99316656052729135");
    // every ensemble member appears, plus the four per-L maxima markers
    const members = readScan(rowsPath).length;
    expect(countMatches(svg, /<circle /g)).toBe(members + 4);
  });

  it("omits blown-up members and says how many", () => {
    const dir = scratchDir();
    const rows = join(dir, "scan.csv");
    const summary = join(dir, "scan_summary.csv");
    writeFileSync(rows,
      "L,seed,stat\n10,0,2.0\n10,1,nan\n20,0,4.0\n", "utf8");
    writeFileSync(summary,
      "key,value\nslope,1.0\nmax_stat_L=10,2.0\nmax_stat_L=20,4.0\n",
      "utf8");
    const svg = renderScanFigure(readScan(rows), readSummary(summary),
                                 summary);
    expect(svg).toContain("1 blown-up member omitted");
    expect(svg).toContain("slope = 1.0");
  });

  it("fails loudly when nothing is finite", () => {
    const dir = scratchDir();
    const rows = join(dir, "scan.csv");
    const summary = join(dir, "scan_summary.csv");
    writeFileSync(rows, "L,seed,stat\n10,0,nan\n", "utf8");
    writeFileSync(summary, "key,value\nslope,1.0\n", "utf8");
    expect(() => renderScanFigure(readScan(rows), readSummary(summary),
                                  summary))
      .toThrowError(/no finite/);
  });
});

describe("renderWaveFigure", () => {
  it("draws one labeled curve per continuation step", () => {
    const waveRows = readWave(fixture("wave_run/wave.csv"));
    const profiles = [0, 1, 2].map(k => {
      const path = fixture(`wave_run/wave_profile_00${k}.csv`);
      return { path, modes: readModes(path) };
    });
    const svg = renderWaveFigure(waveRows, profiles);
    expect(svg).toContain("Traveling-wave profiles");
    expect(svg).toContain("eps = 0.05");
    expect(svg).toContain("eps = 0.025");
    expect(svg).toContain("eps = 0.0125");
    expect(countMatches(svg, /eps = [^,]+, c = /g)).toBe(3);
  });

  it("requires at least one profile", () => {
    const waveRows = readWave(fixture("wave_run/wave.csv"));
    expect(() => renderWaveFigure(waveRows, []))
      .toThrowError(/at least one profile/);
  });
});

describe("renderEquilibriaFigure", () => {
  it("marks every modulus pattern with its stability", () => {
    const rows = readEquilibria(fixture("eq_run/equilibria.csv"));
    const svg = renderEquilibriaFigure(rows);
    expect(countMatches(svg, /<circle /g)).toBe(rows.length);
    expect(svg).toContain(">{}<");
    expect(svg).toContain(">{0}<");
    expect(svg).toContain(">{-1,1}<");
    expect(svg).toContain("filled = stable");
  });
});

describe("renderOde3Figure", () => {
  it("lays out the full gamma-omega grid", () => {
    const rows = readOde3(fixture("ode3_run/ode3.csv"));
    const svg = renderOde3Figure(rows);
    const gammas = new Set(rows.map(r => r.gamma)).size;
    const omegas = new Set(rows.map(r => r.omega)).size;
    expect(rows.length).toBe(gammas * omegas);
    // grid cells + 40 color-bar steps + the document background
    expect(countMatches(svg, /<rect /g)).toBe(gammas * omegas + 40 + 1);
    expect(svg).toContain("Top exponent of the polar reduction, beta = 1");
  });
});

describe("runCli", () => {
  afterEach(() => {
    vi.restoreAllMocks();
  });

  it("writes the rate figure and reports the path", async () => {
    const out = join(scratchDir(), "figs", "rate.svg");
    const log = vi.spyOn(console, "log").mockImplementation(() => {});
    const code = await runCli([
      "rate",
      "--in", fixture("rate_run/rate.csv"),
      fixture("rate_run/rate_summary.csv"),
      "--out", out,
    ]);
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf8"))
      .toContain("slope = 1.0838185179637934");
    expect(log).toHaveBeenCalledWith(`wrote ${out}`);
  });

  it("exits 1 naming the column on a schema mismatch", async () => {
    const dir = scratchDir();
    const bad = join(dir, "rate.csv");
    writeFileSync(bad, "L,eps,err_h2\n50,0.02,0.003\n", "utf8");
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    const code = await runCli([
      "rate", "--in", bad, fixture("rate_run/rate_summary.csv"),
      "--out", join(dir, "rate.svg"),
    ]);
    expect(code).toBe(1);
    const message = String(err.mock.calls[0]?.[0]);
    expect(message).toContain("displab-figures:");
    expect(message).toContain('"err_h2"');
    expect(existsSync(join(dir, "rate.svg"))).toBe(false);
  });

  it("exits 1 when a kind is missing its inputs", async () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    const code = await runCli([
      "rate", "--in", fixture("rate_run/rate.csv"),
      "--out", join(scratchDir(), "rate.svg"),
    ]);
    expect(code).toBe(1);
    expect(String(err.mock.calls[0]?.[0]))
      .toContain("expected at least 2 --in files");
  });

  it("leaves no figure behind when the table has no data rows", async () => {
    const dir = scratchDir();
    const empty = join(dir, "rate.csv");
    writeFileSync(empty, "L,eps,err_h1\n", "utf8");
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    const out = join(dir, "rate.svg");
    const code = await runCli([
      "rate", "--in", empty, fixture("rate_run/rate_summary.csv"),
      "--out", out,
    ]);
    expect(code).toBe(1);
    expect(String(err.mock.calls[0]?.[0])).toContain("no data rows");
    expect(existsSync(out)).toBe(false);
  });

  it("exits 1 on an unknown figure kind", async () => {
    vi.spyOn(console, "error").mockImplementation(() => {});
    const code = await runCli([
      "volcano", "--in", fixture("rate_run/rate.csv"),
      "--out", join(scratchDir(), "x.svg"),
    ]);
    expect(code).toBe(1);
  });

  it("renders every fixture kind end to end", async () => {
    const dir = scratchDir();
    vi.spyOn(console, "log").mockImplementation(() => {});
    const jobs: [string, string[]][] = [
      ["scan", [fixture("scan_run/scan.csv"),
                fixture("scan_run/scan_summary.csv")]],
      ["wave", [fixture("wave_run/wave.csv"),
                fixture("wave_run/wave_profile_000.csv"),
                fixture("wave_run/wave_profile_001.csv"),
                fixture("wave_run/wave_profile_002.csv")]],
      ["equilibria", [fixture("eq_run/equilibria.csv")]],
      ["ode3", [fixture("ode3_run/ode3.csv")]],
    ];
    for (const [kind, inputs] of jobs) {
      const out = join(dir, `${kind}.svg`);
      const code = await runCli([kind, "--in", ...inputs, "--out", out]);
      expect(code, kind).toBe(0);
      const svg = readFileSync(out, "utf8");
      expect(svg.startsWith("<svg"), kind).toBe(true);
      expect(svg.trimEnd().endsWith("</svg>"), kind).toBe(true);
    }
  });
});
