// Resilience panel: TGD per lambda plus the per-pair EPD table. All
// numbers are server-reported and tagged with the revision they were
// computed at; anything older than the session revision is flagged.

import { Store, lambdaKey, parseLambdaList } from "./state.js";
import { Controller } from "./controller.js";

function fmt(value: number): string {
  return value.toFixed(6);
}

export function mountPanel(root: HTMLElement, store: Store, controller: Controller) {
  root.innerHTML = `
    <div class="panel-head">
      <h2>Resilience</h2>
      <span id="report-revision" class="tag"></span>
      <span id="report-stale" class="tag stale hidden">stale</span>
    </div>
    <label class="lambda-row">&lambda; sweep
      <input id="lambda-input" value="0.2, 1, 5" spellcheck="false" />
    </label>
    <div id="report-error" class="error hidden"></div>
    <table id="tgd-table" class="metrics"></table>
    <details id="pairs-details">
      <summary>Per-pair diversity</summary>
      <table id="pairs-table" class="metrics"></table>
    </details>
  `;

  const lambdaInput = root.querySelector<HTMLInputElement>("#lambda-input")!;
  const revisionTag = root.querySelector<HTMLElement>("#report-revision")!;
  const staleTag = root.querySelector<HTMLElement>("#report-stale")!;
  const errorBox = root.querySelector<HTMLElement>("#report-error")!;
  const tgdTable = root.querySelector<HTMLTableElement>("#tgd-table")!;
  const pairsTable = root.querySelector<HTMLTableElement>("#pairs-table")!;

  lambdaInput.addEventListener("change", () => {
    const lambdas = parseLambdaList(lambdaInput.value);
    if (!lambdas) {
      lambdaInput.classList.add("invalid");
      return;
    }
    lambdaInput.classList.remove("invalid");
    void controller.setLambdas(lambdas);
  });

  store.subscribe(() => {
    const { report, reportError } = store.get();
    staleTag.classList.toggle("hidden", !store.reportIsStale());
    errorBox.classList.toggle("hidden", !reportError);
    errorBox.textContent = reportError ?? "";
    if (!report) {
      revisionTag.textContent = "";
      tgdTable.innerHTML = "";
      pairsTable.innerHTML = "";
      return;
    }
    revisionTag.textContent = `@ revision ${report.revision}`;

    const lambdaKeys = report.lambdas.map(lambdaKey);
    tgdTable.innerHTML =
      `<tr><th>&lambda;</th>${report.lambdas.map((l) => `<th>${l}</th>`).join("")}</tr>` +
      `<tr><td>TGD</td>${lambdaKeys.map((k) => `<td>${fmt(report.tgd[k])}</td>`).join("")}</tr>`;

    pairsTable.innerHTML =
      `<tr><th>pair</th><th>k_sd</th>${report.lambdas.map((l) => `<th>EPD@${l}</th>`).join("")}</tr>` +
      report.pairs
        .map(
          (p) =>
            `<tr><td>${p.source}&rarr;${p.destination}</td><td>${fmt(p.k_sd)}</td>` +
            lambdaKeys.map((k) => `<td>${fmt(p.epd[k])}</td>`).join("") +
            "</tr>",
        )
        .join("");
  });
}
