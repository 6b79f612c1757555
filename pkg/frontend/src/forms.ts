// Attack composer: one form whose visible fields follow the selected
// kind. Client-side validation runs first; server rejections land on
// the field that caused them.

import { Controller } from "./controller.js";
import { ATTACK_KINDS, EMPTY_FIELDS, targetHint, type AttackFields, type FieldName } from "./attackForm.js";
import { Store } from "./state.js";
import type { AttackKind } from "./types.js";

const FIELD_ROWS: { name: FieldName; label: string; kinds: AttackKind[] }[] = [
  { name: "target", label: "Target", kinds: ["communication", "control", "sensor", "actuator"] },
  { name: "start", label: "Start", kinds: ["communication", "control", "sensor", "actuator"] },
  { name: "end", label: "End", kinds: ["communication", "control", "sensor", "actuator"] },
  { name: "value", label: "Inject value", kinds: ["communication", "sensor"] },
  { name: "offset", label: "Inject offset", kinds: ["communication", "sensor"] },
  { name: "state", label: "Forced state", kinds: ["actuator"] },
  { name: "settingValue", label: "Setting", kinds: ["actuator"] },
  { name: "rule", label: "Replacement rule", kinds: ["control"] },
];

export function mountAttackForm(root: HTMLElement, store: Store, controller: Controller) {
  root.innerHTML = `
    <h2>Attacks</h2>
    <label>Kind
      <select id="attack-kind">
        ${ATTACK_KINDS.map((k) => `<option value="${k}">${k}</option>`).join("")}
      </select>
    </label>
    <div id="attack-fields"></div>
    <div id="attack-form-error" class="error hidden"></div>
    <button id="attack-submit">Add attack</button>
    <ul id="attack-list"></ul>
  `;

  const kindSelect = root.querySelector<HTMLSelectElement>("#attack-kind")!;
  const fieldBox = root.querySelector<HTMLElement>("#attack-fields")!;
  const formError = root.querySelector<HTMLElement>("#attack-form-error")!;
  const submit = root.querySelector<HTMLButtonElement>("#attack-submit")!;
  const list = root.querySelector<HTMLUListElement>("#attack-list")!;

  const kind = (): AttackKind => kindSelect.value as AttackKind;

  function renderFields() {
    fieldBox.innerHTML = FIELD_ROWS.filter((row) => row.kinds.includes(kind()))
      .map(
        (row) => `
          <label>${row.label}
            ${
              row.name === "state"
                ? `<select data-field="state">
                     <option value="closed">closed</option>
                     <option value="open">open</option>
                     <option value="setting">setting</option>
                   </select>`
                : `<input data-field="${row.name}" value="${EMPTY_FIELDS[row.name]}"
                     placeholder="${row.name === "target" ? targetHint(kind()) : ""}" spellcheck="false" />`
            }
            <span class="field-error" data-error-for="${row.name}"></span>
          </label>`,
      )
      .join("");
  }

  function readFields(): AttackFields {
    const fields = { ...EMPTY_FIELDS };
    fieldBox.querySelectorAll<HTMLInputElement | HTMLSelectElement>("[data-field]").forEach((el) => {
      fields[el.dataset.field as FieldName] = el.value;
    });
    return fields;
  }

  function showErrors(errors: Partial<Record<FieldName, string>>, formLevel?: string) {
    fieldBox.querySelectorAll<HTMLElement>("[data-error-for]").forEach((el) => {
      el.textContent = errors[el.dataset.errorFor as FieldName] ?? "";
    });
    formError.classList.toggle("hidden", !formLevel);
    formError.textContent = formLevel ?? "";
  }

  kindSelect.addEventListener("change", () => {
    renderFields();
    showErrors({});
  });
  renderFields();

  submit.addEventListener("click", async () => {
    const result = await controller.addAttack(kind(), readFields());
    if (result.ok) {
      renderFields(); // reset
      showErrors({});
    } else {
      showErrors(result.errors, result.formError);
    }
  });

  store.subscribe(() => {
    const session = store.get().session;
    if (!session) {
      return;
    }
    list.innerHTML = session.attacks
      .map(
        (a) =>
          `<li><code>${a.id}</code> ${a.kind}
           <button class="remove-attack" data-id="${a.id}" title="remove">&times;</button></li>`,
      )
      .join("");
    list.querySelectorAll<HTMLButtonElement>(".remove-attack").forEach((button) => {
      button.addEventListener("click", () => void controller.removeAttack(button.dataset.id!));
    });
  });
}
